"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ParamLPError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(ParamLPError, ValueError):
    """Operand dimensions are inconsistent."""


class NumericFailure(ParamLPError):
    """A dense kernel or an LP solve did not converge to a usable answer."""

    def __init__(self, message: str, **context):
        self.context = context
        if context:
            detail = ", ".join(f"{k}={v!r}" for k, v in context.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class UnsupportedSize(ParamLPError, ValueError):
    """Input exceeds the size bound of a combinatorial routine."""


class DegenerateInput(ParamLPError, ValueError):
    """Input is degenerate in a way the operation cannot handle (e.g. zero polynomial)."""


class InconsistencyError(ParamLPError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message: str, **context):
        self.context = context
        if context:
            detail = ", ".join(f"{k}={v!r}" for k, v in context.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class PoleError(ParamLPError, ZeroDivisionError):
    """A rational function was evaluated at (or numerically at) a pole."""


class ProbeFailure(ParamLPError):
    """The sweep could not place a probe strictly inside the next interval."""

    def __init__(self, message: str, lam: float):
        self.lam = lam
        super().__init__(f"{message} at lambda={lam!r}")


class ParseError(ParamLPError, ValueError):
    """Malformed text input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MPSParseError(ParseError):
    """Malformed MPS input."""


class PerturbationParseError(ParseError):
    """Malformed perturbation file."""


class UnsupportedFeature(ParamLPError, ValueError):
    """MPS input uses a section or bound type outside the supported subset."""
