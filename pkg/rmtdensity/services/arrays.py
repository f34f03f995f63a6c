from typing import Tuple, Union

import numpy as np

from rmtdensity.exceptions import DomainError

ArrayLike = Union[float, np.ndarray]


def as_array(x: ArrayLike) -> Tuple[np.ndarray, bool]:
    """Return x as a float array and whether the caller passed a scalar."""
    scalar = np.ndim(x) == 0
    return np.atleast_1d(np.asarray(x, dtype=float)), scalar


def restore(values: np.ndarray, scalar: bool) -> ArrayLike:
    if scalar:
        return float(values[0])
    return values


def reject(mask: np.ndarray, x: np.ndarray, message: str, bound: str, error=DomainError) -> None:
    """Raise `error` naming the first point of x where mask holds."""
    if np.any(mask):
        point = float(x[np.argmax(mask)])
        raise error(message, point=point, bound=bound)


def reject_nonfinite(x: np.ndarray) -> None:
    reject(~np.isfinite(x), x, "argument must be finite", "finite real")
