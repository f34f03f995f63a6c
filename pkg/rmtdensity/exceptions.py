from typing import Optional


class RMTDensityError(Exception):
    """Base class for every error raised by rmtdensity."""


class DomainError(RMTDensityError, ValueError):
    """An argument lies outside the admissible domain of an operation."""

    def __init__(self, message: str, point: Optional[float] = None, bound: Optional[str] = None):
        self.point = point
        self.bound = bound
        if point is not None and bound is not None:
            message = f"{message} (point={point!r}, bound: {bound})"
        super().__init__(message)


class DivergentWeightError(DomainError):
    """LUE weight evaluated at the origin with alpha < 0."""


class PoleError(DomainError):
    """Evaluation at a pole: the LUE origin, or z on the excluded set of the action."""


class CoalescedSaddleError(DomainError):
    """Saddle data requested where z_+ and z_- coalesce (|x| >= 1)."""


class ContourConfigError(RMTDensityError, ValueError):
    """Contour parameters incompatible with the ensemble or the size guard."""


class QuadratureError(RMTDensityError, ArithmeticError):
    """A quadrature did not reach its tolerance."""

    def __init__(self, message: str, estimate: Optional[float] = None):
        self.estimate = estimate
        if estimate is not None:
            message = f"{message} (achieved estimate {estimate:.3e})"
        super().__init__(message)


class ToleranceError(RMTDensityError):
    """An oracle comparison exceeded its tolerance."""
