"""
Error hierarchy shared by every package
"""

from typing import Optional


class NucError(Exception):
    """Base class for all toolkit errors"""
    kind = "error"

    def to_record(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class DimensionError(NucError, ValueError):
    """Tensor or image shapes do not line up"""
    kind = "dimension"


class ConfigError(NucError, ValueError):
    """Invalid configuration value or inconsistent configuration"""
    kind = "config"


class UsageError(NucError, RuntimeError):
    """API used in a way it does not support"""
    kind = "usage"


class DomainError(NucError, ValueError):
    """Numeric argument outside the domain of a function"""
    kind = "domain"


class FitError(NucError, RuntimeError):
    """Calibration fit cannot be solved"""
    kind = "fit"


class FormatError(NucError, ValueError):
    """Corrupt or unsupported file content"""
    kind = "format"

    def __init__(self, message: str, offset: Optional[int] = None, path: Optional[str] = None):
        self.offset = offset
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f"byte {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)

    def to_record(self) -> dict:
        record = super().to_record()
        record["offset"] = self.offset
        return record


class NumericalError(NucError, FloatingPointError):
    """NaN or Inf produced during optimisation"""
    kind = "numerical"

    def __init__(self, message: str, path: Optional[str] = None, step: Optional[int] = None):
        self.path = path
        self.step = step
        if path is not None or step is not None:
            message = f"{message} (parameter={path}, step={step})"
        super().__init__(message)
