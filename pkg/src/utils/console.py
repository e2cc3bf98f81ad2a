"""
Console status output for the command line
"""

import logging
import sys

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str = "WARNING") -> None:
    """Configure the root logger once for a CLI run"""
    numeric = logging.getLevelName(str(level).upper())
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(level=numeric, format=LOG_FORMAT, stream=sys.stderr, force=True)


def banner(title: str, width: int = 60) -> None:
    print("\n" + "=" * width)
    print(title)
    print("=" * width)


def ok(message: str) -> None:
    print(f"   ✓ {message}")


def warn(message: str) -> None:
    print(f"   ⚠ {message}")


def fail(message: str) -> None:
    print(f"   ✗ {message}")


def info(message: str) -> None:
    print(f"   {message}")
