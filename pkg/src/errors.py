"""
Exception hierarchy for ratlin.

All errors raised on purpose by the library derive from RatlinError, which
itself is a ValueError so callers that only expect bad-input errors keep
working. The CLI maps RatlinError to a dedicated exit code.
"""

from typing import Optional


class RatlinError(ValueError):
    """Base class for all ratlin errors."""


class ZeroDivisorError(RatlinError):
    """Raised when a rational function would get a zero denominator."""

    def __init__(self, message: str = "division by zero polynomial"):
        super().__init__(message)


class PolyGcdError(RatlinError):
    """Raised when the gcd of two zero polynomials is requested."""

    def __init__(self, message: str = "gcd of two zero polynomials is undefined"):
        super().__init__(message)


class DimensionError(RatlinError):
    """Shape mismatch, bad index list or non-square input where square is required."""


class StateMatrixSingularError(RatlinError):
    """The designated state submatrix of a polynomial system matrix is singular."""

    def __init__(self, message: str = "state matrix singular"):
        super().__init__(message)


class MinimalityPreconditionError(RatlinError):
    """A structure query needs minimality at a point and the system matrix is not minimal there."""

    def __init__(self, point: str, detail: Optional[str] = None):
        self.point = point
        message = f"minimality precondition violated at {point}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class RankDeficientError(RatlinError):
    """A rational or polynomial matrix lacks the full row normal rank an operation needs."""


class DualityError(RatlinError):
    """A pair (K, N) is not a pair of dual rational bases."""


class NodePoleCoincidenceError(RatlinError):
    """Some NLEIGS pole coincides with some node, so the minimality criteria do not apply."""

    def __init__(self, node_index: int, pole_index: int, value: str):
        self.node_index = node_index
        self.pole_index = pole_index
        super().__init__(
            f"node/pole coincidence: xi_{pole_index} = sigma_{node_index} = {value}; "
            f"minimality criterion requires distinct nodes and poles"
        )


class LowRankFactorError(RatlinError):
    """The low-rank factor U of an NLEIGS low-rank family lacks full column rank."""


class DegreeError(RatlinError):
    """A linearization claim was made with a pencil of degree larger than one."""


class FormatError(RatlinError):
    """A text file or literal could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParameterError(RatlinError):
    """Invalid pencil family parameters: repeated nodes, zero scalings, too few coefficients."""
