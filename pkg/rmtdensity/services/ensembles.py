import logging
import math
from typing import Tuple

import numpy as np

from rmtdensity.exceptions import CoalescedSaddleError, DivergentWeightError, DomainError, PoleError
from rmtdensity.models.schemas import EnsembleSpec, SaddleData
from rmtdensity.services.arrays import ArrayLike, as_array, reject, reject_nonfinite, restore
from rmtdensity.services.specfun import log_gamma

"""
Ensemble definitions for the GUE and LUE in the scaling where both limiting
laws live on [-1, 1] and (0, 1]:

    GUE: w_N(x) = exp(-2N x^2),        x real
    LUE: w_N(x) = x^alpha exp(-4N x),  x > 0

Everything here is closed form: weights, limiting densities and their
distribution functions, saddle-point data of the action, norm constants of
the monic orthogonal polynomials (in log space), and the soft-edge scaling.
"""

logger = logging.getLogger(__name__)

TWO_OVER_PI = 2.0 / math.pi


def support(spec: EnsembleSpec) -> Tuple[float, float]:
    """Closure of the support of the limiting density."""
    return (-1.0, 1.0) if spec.is_gue else (0.0, 1.0)


def _arccos(x: np.ndarray) -> np.ndarray:
    return 0.5 * math.pi - np.arcsin(x)


def weight(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    values, scalar = as_array(x)
    reject_nonfinite(values)
    n = spec.n
    if spec.is_gue:
        return restore(np.exp(-2.0 * n * values**2), scalar)

    reject(values < 0, values, "LUE weight is defined for x >= 0 only", "x >= 0")
    at_origin = values == 0
    if np.any(at_origin) and spec.alpha < 0:
        raise DivergentWeightError("LUE weight diverges at the origin for alpha < 0", point=0.0, bound="alpha >= 0 at x = 0")

    result = np.empty_like(values)
    positive = ~at_origin
    result[positive] = np.exp(spec.alpha * np.log(values[positive]) - 4.0 * n * values[positive])
    result[at_origin] = 1.0 if spec.alpha == 0 else 0.0
    return restore(result, scalar)


def _nu_core(spec: EnsembleSpec, x: np.ndarray) -> np.ndarray:
    if spec.is_gue:
        return np.sqrt(1.0 - x * x)
    return np.sqrt((1.0 - x) / x)


def limiting_density(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """Semicircle (GUE) or Marchenko-Pastur (LUE) density, zero off the support."""
    values, scalar = as_array(x)
    reject_nonfinite(values)
    result = np.zeros_like(values)
    if spec.is_gue:
        inside = np.abs(values) <= 1.0
    else:
        reject(values == 0, values, "the LUE limiting density has a pole at the origin", "x != 0", error=PoleError)
        inside = (values > 0) & (values <= 1.0)
    result[inside] = TWO_OVER_PI * _nu_core(spec, values[inside])
    return restore(result, scalar)


def distribution_function(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    """P(x), the integral of the limiting density from the left edge of its support."""
    values, scalar = as_array(x)
    reject_nonfinite(values)
    left, right = support(spec)
    reject((values < left) | (values > right), values, "distribution function evaluated off the support", f"{left} <= x <= {right}")

    if spec.is_gue:
        x_rho = values * np.sqrt(1.0 - values * values) / math.pi
        result = 1.0 + x_rho - _arccos(values) / math.pi
    else:
        x_rho = TWO_OVER_PI * np.sqrt(values * (1.0 - values))
        result = 1.0 + x_rho - TWO_OVER_PI * _arccos(np.sqrt(values))
    return restore(result, scalar)


def nu(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    values, scalar = as_array(x)
    reject_nonfinite(values)
    if spec.is_gue:
        reject(np.abs(values) > 1.0, values, "nu is defined on the support only", "|x| <= 1")
    else:
        reject((values <= 0) | (values > 1.0), values, "nu is defined on the support only", "0 < x <= 1")
    return restore(_nu_core(spec, values), scalar)


def saddle_data(spec: EnsembleSpec, x: float) -> SaddleData:
    """The conjugate pair of simple saddles of S(z, x) for a bulk point x."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("saddle data needs a finite x", point=x, bound="finite real")
    if spec.is_gue:
        if abs(x) >= 1.0:
            raise CoalescedSaddleError("saddles coalesce at the soft edge; use the edge expansion", point=x, bound="|x| < 1")
    else:
        if x <= 0:
            raise DomainError("LUE saddle data is defined for 0 < x < 1", point=x, bound="x > 0")
        if x >= 1.0:
            raise CoalescedSaddleError("saddles coalesce at the soft edge; use the edge expansion", point=x, bound="x < 1")

    nu_x = float(_nu_core(spec, np.array([x]))[0])
    p = float(distribution_function(spec, x))
    if spec.is_gue:
        z_plus = complex(-x, nu_x)
        half_curvature = nu_x * complex(math.cos(math.pi - math.asin(x)), math.sin(math.pi - math.asin(x)))
        re_s = 0.5 + x * x
    else:
        z_plus = complex(-1.0, nu_x)
        half_curvature = complex(0.0, 2.0 * x * x * nu_x)
        re_s = 2.0 * x - math.log(2.0)

    return SaddleData(
        z_plus=z_plus,
        z_minus=z_plus.conjugate(),
        s_second_deriv_plus=half_curvature,
        re_s_plus=re_s,
        im_s_plus=-math.pi * p,
    )


def inverse_norm_squared_log(spec: EnsembleSpec) -> float:
    """log of 1/||pi_{N-1}||^2 for the monic polynomials of w_N."""
    n = spec.n
    if spec.is_gue:
        return (
            (2 * n - 1.5) * math.log(2.0)
            + (n + 0.5) * math.log(n)
            - 0.5 * math.log(math.pi)
            - log_gamma(n + 1)
        )
    return (2 * n + spec.alpha - 1) * math.log(4.0 * n) - log_gamma(n) - log_gamma(n + spec.alpha)


def log_monic_norm_squared(spec: EnsembleSpec, k: int) -> float:
    """log ||pi_k||^2 for any degree k >= 0."""
    if k < 0:
        raise DomainError("polynomial degree must be nonnegative", point=k, bound="k >= 0")
    four_n = 4.0 * spec.n
    if spec.is_gue:
        return 0.5 * math.log(math.pi / (2.0 * spec.n)) + log_gamma(k + 1) - k * math.log(four_n)
    return log_gamma(k + 1) + log_gamma(k + spec.alpha + 1) - (2 * k + 1 + spec.alpha) * math.log(four_n)


def log_contour_constant(spec: EnsembleSpec, j: int) -> float:
    """log c_j(N) = log[(N+j-1)! / (2N)^(N+j-1)]."""
    degree = spec.n + j - 1
    return log_gamma(degree + 1) - degree * math.log(2.0 * spec.n)


def log_prefactor(spec: EnsembleSpec) -> float:
    """log of 2 c_0 c_1 / ||pi_{N-1}||^2, the constant in front of w_N(x) J_N(x)."""
    return (
        math.log(2.0)
        + log_contour_constant(spec, 0)
        + log_contour_constant(spec, 1)
        + inverse_norm_squared_log(spec)
    )


def prefactor_asymptotic(spec: EnsembleSpec) -> Tuple[float, float]:
    """
    Large-N form of the prefactor as (log of the leading factor, 1 + h/N).

    GUE: 2N e^{-N} [1 + 1/(12N)];  LUE: 4^{N+alpha} N [1 - alpha(alpha-1)/(2N)].
    """
    n = spec.n
    if spec.is_gue:
        return math.log(2.0 * n) - n, 1.0 + 1.0 / (12.0 * n)
    alpha = spec.alpha
    return (n + alpha) * math.log(4.0) + math.log(n), 1.0 - alpha * (alpha - 1.0) / (2.0 * n)


def airy_scale_b(spec: EnsembleSpec) -> float:
    """Half the third derivative of S(z, 1) at the double saddle z = -1."""
    return 1.0 if spec.is_gue else 2.0


def edge_to_x(spec: EnsembleSpec, xi: ArrayLike) -> ArrayLike:
    """x = 1 + b^(1/3) xi / (2 N^(2/3))."""
    values, scalar = as_array(xi)
    b = airy_scale_b(spec)
    return restore(1.0 + b ** (1.0 / 3.0) * values / (2.0 * spec.n ** (2.0 / 3.0)), scalar)


def x_to_edge(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    values, scalar = as_array(x)
    b = airy_scale_b(spec)
    return restore((values - 1.0) * 2.0 * spec.n ** (2.0 / 3.0) / b ** (1.0 / 3.0), scalar)


def edge_density_scale(spec: EnsembleSpec) -> float:
    """(bN)^(1/3)/2: N^(1/3)/2 for the GUE, (2N)^(1/3)/2 for the LUE."""
    return (airy_scale_b(spec) * spec.n) ** (1.0 / 3.0) / 2.0


def clamp_to_hard_edge(spec: EnsembleSpec, grid: np.ndarray, epsilon: float) -> np.ndarray:
    """Raise LUE grid points in [0, epsilon) to epsilon, dropping the duplicates this creates."""
    grid = np.asarray(grid, dtype=float)
    if spec.is_gue:
        return grid
    reject(grid < 0, grid, "LUE grids must not extend below the hard edge", "x >= 0")
    low = grid < epsilon
    if not np.any(low):
        return grid
    logger.warning(f"Clamped {int(np.sum(low))} LUE grid points to the hard-edge floor {epsilon}")
    return np.unique(np.maximum(grid, epsilon))
