from __future__ import annotations

from typing import Optional


class SynthesisError(Exception):
    """Base class for every error the toolkit reports to its callers."""

    exit_code = 2


class BlifSyntaxError(SynthesisError, ValueError):
    exit_code = 1

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NetlistError(SynthesisError, ValueError):
    pass


class DimensionError(SynthesisError, ValueError):
    pass


class PortMismatchError(SynthesisError, ValueError):
    pass


class PartitionError(SynthesisError, ValueError):
    pass


class ConfigError(SynthesisError, ValueError):
    pass


class BudgetError(SynthesisError):
    exit_code = 3
