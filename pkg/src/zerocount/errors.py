"""Exception hierarchy shared by all zerocount modules."""

from __future__ import annotations

__all__ = [
    "ZeroCountError", "ExpressionSyntaxError", "UnknownIdentifier", "EvaluationError",
    "DomainError", "NonSmoothPoint", "KernelError", "UnsupportedKernel", "NonConvergence",
    "NonIntegerResult", "SelectionFailure", "AmbiguousDecode", "InfeasibleSums",
    "IllDefinedMultiplicity", "SuspectCluster",
]


class ZeroCountError(Exception):
    """Base class for every error raised by zerocount."""


class ExpressionSyntaxError(ZeroCountError, ValueError):
    """Malformed expression text.

    Attributes:
        offset: byte offset into the source at which parsing failed.
        expected: sorted tuple of token descriptions that would have been accepted.
    """

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownIdentifier(ExpressionSyntaxError):
    """A name that is neither the variable, a constant, nor a built-in function."""


class EvaluationError(ZeroCountError):
    """The function model could not be evaluated at a point."""

    def __init__(self, message: str, x: float | None = None):
        self.x = x
        super().__init__(message if x is None else f"{message} at x={x!r}")


class DomainError(EvaluationError):
    """Argument outside a function's real domain (ln/sqrt of a negative, 1/0)."""


class NonSmoothPoint(EvaluationError):
    """Derivatives are undefined at the point (abs or sqrt at 0)."""


class KernelError(ZeroCountError):
    """A user-supplied kernel failed validation."""


class UnsupportedKernel(ZeroCountError):
    """The kernel lacks the smoothness an operation requires."""


class NonConvergence(ZeroCountError):
    """A quadrature did not reach its tolerance."""


class NonIntegerResult(ZeroCountError):
    """The counting sum is too far from an integer to be trusted.

    The offending report is attached as ``report``.
    """

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class SelectionFailure(ZeroCountError):
    """No pole-free constant c was found for the g1 weight."""


class AmbiguousDecode(ZeroCountError):
    """Two multiplicity profiles are both compatible with the measured sums."""

    def __init__(self, message: str, candidates=(), sums=None):
        self.candidates = tuple(candidates)
        self.sums = sums
        super().__init__(message)


class InfeasibleSums(ZeroCountError):
    """No integer profile satisfies the S0/S1 constraints."""


class IllDefinedMultiplicity(ZeroCountError):
    """A zero with multiplicity 0 or without a limit blocks the requested operation."""


class SuspectCluster(ZeroCountError):
    """Two located zeros are closer than the scan can separate."""

    def __init__(self, message: str, zeros=()):
        self.zeros = tuple(zeros)
        super().__init__(message)
