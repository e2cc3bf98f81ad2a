"""
Environment and configuration handling
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import load_dotenv

from .errors import ConfigError
from .file_handlers import atomic_write_text

ENV_PREFIX = "NUC_"
RESOLVED_FILENAME = "resolved.json"


def load_env(filename: Optional[str] = None) -> bool:
    """Load .env into the process environment without overriding set variables"""
    if filename is None:
        return load_dotenv(override=False)
    if not os.path.exists(filename):
        return False
    return load_dotenv(filename, override=False)


def get_env_var(key: str, default: Optional[str] = None) -> Optional[str]:
    """Get a NUC_* environment variable with fallback"""
    return os.environ.get(f"{ENV_PREFIX}{key.upper()}", default)


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    """Load a JSON config file; keys use CLI flag names with underscores"""
    if not path:
        return {}
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _coerce(value: str, like: Any) -> Any:
    if isinstance(like, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(like, int):
        return int(value)
    if isinstance(like, float):
        return float(value)
    return value


def resolve_settings(flags: Mapping[str, Any],
                     file_config: Mapping[str, Any],
                     defaults: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Merge settings: explicit flag > config file > NUC_* environment > default

    A flag counts as explicit when its parsed value is not None.
    """
    resolved: Dict[str, Any] = {}
    keys = set(defaults) | set(file_config) | {k for k, v in flags.items() if v is not None}
    for key in sorted(keys):
        flag_value = flags.get(key)
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in file_config:
            resolved[key] = file_config[key]
        else:
            env_value = get_env_var(key)
            default = defaults.get(key)
            if env_value is not None:
                try:
                    resolved[key] = _coerce(env_value, default)
                except ValueError as e:
                    raise ConfigError(f"environment variable {ENV_PREFIX}{key.upper()}={env_value!r}: {e}") from e
            else:
                resolved[key] = default
    return resolved


def write_resolved(out_dir: str, resolved: Mapping[str, Any]) -> Path:
    """Echo the fully resolved config into out_dir/resolved.json"""
    path = Path(out_dir) / RESOLVED_FILENAME
    text = json.dumps(_jsonable(resolved), indent=2, sort_keys=True)
    atomic_write_text(path, text + "\n")
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    return value
