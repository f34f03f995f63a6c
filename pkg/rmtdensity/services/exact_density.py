import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

import numpy as np

from rmtdensity.config import settings
from rmtdensity.exceptions import DomainError, QuadratureError
from rmtdensity.models.schemas import DensityCurve, DensityMethod, EnsembleSpec, MomentResult
from rmtdensity.services import asymptotics, contour_oracle, ensembles
from rmtdensity.services.arrays import ArrayLike, as_array, reject, reject_nonfinite, restore
from rmtdensity.services.quadrature import adaptive_gauss_legendre
from rmtdensity.services.specfun import wavefunction_table

"""
Exact finite-N density.

rho_N(x) = (1/N) sum_{k<N} phi_k(x)^2, the confluent Christoffel-Darboux
kernel written with weight-folded orthonormal wavefunctions. The derivative
form with monic polynomials is available for small N as a cross-check.
"""

logger = logging.getLogger(__name__)

MAX_MOMENT_POWER = 20
CHRISTOFFEL_DARBOUX_MAX_N = 6
_CHUNK = 64


def density_exact(spec: EnsembleSpec, x: ArrayLike) -> ArrayLike:
    values, scalar = as_array(x)
    table = wavefunction_table(spec, values)
    return restore(np.sum(table * table, axis=0) / spec.n, scalar)


def _density_over_power(spec: EnsembleSpec, x: np.ndarray) -> np.ndarray:
    """rho_N(x) / x^alpha for the LUE, finite down to x = 0."""
    table = wavefunction_table(spec, x, include_power=False)
    return (4.0 * spec.n) ** spec.alpha * np.sum(table * table, axis=0) / spec.n


def edge_scaled_exact(spec: EnsembleSpec, xi: ArrayLike) -> ArrayLike:
    """The exact density in soft-edge variables: (bN)^(1/3)/2 * rho_N(edge_to_x(xi))."""
    values, scalar = as_array(xi)
    reject_nonfinite(values)
    density = density_exact(spec, ensembles.edge_to_x(spec, values))
    return restore(ensembles.edge_density_scale(spec) * density, scalar)


def _monic_pair(spec: EnsembleSpec, x: Fraction) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """pi_{N-1}, pi_N and their derivatives at x, exactly."""
    four_n = Fraction(4 * spec.n)
    alpha = Fraction(spec.alpha)
    p_prev, p_cur = Fraction(0), Fraction(1)
    d_prev, d_cur = Fraction(0), Fraction(0)
    for k in range(spec.n):
        if spec.is_gue:
            a_k, b_k = Fraction(0), Fraction(k) / four_n
        else:
            a_k = (2 * k + 1 + alpha) / four_n
            b_k = k * (k + alpha) / (four_n * four_n)
        p_next = (x - a_k) * p_cur - b_k * p_prev
        d_next = p_cur + (x - a_k) * d_cur - b_k * d_prev
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
    return p_prev, p_cur, d_prev, d_cur


def density_christoffel_darboux(spec: EnsembleSpec, x: float) -> float:
    """
    rho_N(x) = w_N(x) [pi_N'(x) pi_{N-1}(x) - pi_{N-1}'(x) pi_N(x)] / (N ||pi_{N-1}||^2).

    The monic recurrences run in exact rational arithmetic; N <= 6.
    """
    if spec.n > CHRISTOFFEL_DARBOUX_MAX_N:
        raise DomainError("derivative-form kernel is limited to small N", point=spec.n, bound=f"N <= {CHRISTOFFEL_DARBOUX_MAX_N}")
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("density needs a finite x", point=x, bound="finite real")
    if not spec.is_gue and x <= 0:
        raise DomainError("LUE density is evaluated for x > 0", point=x, bound="x > 0")

    pi_low, pi_high, d_low, d_high = _monic_pair(spec, Fraction(x))
    wronskian = d_high * pi_low - d_low * pi_high
    log_norm = ensembles.log_monic_norm_squared(spec, spec.n - 1)
    return float(ensembles.weight(spec, x)) * math.exp(math.log(float(wronskian)) - log_norm) / spec.n


# --- Integration domain ----------------------------------------------------


def _edge_margin(spec: EnsembleSpec, p: int) -> float:
    """Smallest delta = 5 N^(-2/3) * 1.5^j with x^p rho_N below the endpoint threshold at 1 + delta."""
    delta = 5.0 * spec.n ** (-2.0 / 3.0)
    for _ in range(60):
        probes = [1.0 + delta] if not spec.is_gue else [-1.0 - delta, 1.0 + delta]
        tail = max(abs(probe) ** p * float(density_exact(spec, probe)) for probe in probes)
        if tail < settings.endpoint_threshold:
            return delta
        delta *= 1.5
    raise QuadratureError(f"no integration cutoff found for {spec.label()}", estimate=tail)


def integrate_density(spec: EnsembleSpec, p: int = 0) -> Tuple[float, float]:
    """
    Integral of x^p rho_N(x) over the density's effective support.

    GUE: [-1-delta, 1+delta]. LUE: [0, 1+delta], substituted so the hard edge
    stays integrable for the Gauss rule:
    - alpha >= 0: x = t^2, turning x^alpha into t^(2 alpha + 1);
    - alpha < 0: x = t^q with q = 1/(alpha + 1), which cancels x^alpha dx
      exactly and leaves q rho_N(x) / x^alpha, finite at t = 0.
    Returns (value, error estimate).
    """
    delta = _edge_margin(spec, p)
    if spec.is_gue:
        def integrand(x: np.ndarray) -> np.ndarray:
            return x**p * density_exact(spec, x)

        return adaptive_gauss_legendre(integrand, -1.0 - delta, 1.0 + delta)

    if spec.alpha >= 0:
        def squared(t: np.ndarray) -> np.ndarray:
            x = t * t
            return 2.0 * t * x**p * density_exact(spec, x)

        return adaptive_gauss_legendre(squared, 0.0, math.sqrt(1.0 + delta))

    q = 1.0 / (spec.alpha + 1.0)

    def powered(t: np.ndarray) -> np.ndarray:
        x = t**q
        return q * x**p * _density_over_power(spec, x)

    return adaptive_gauss_legendre(powered, 0.0, (1.0 + delta) ** (1.0 / q))


def moment(spec: EnsembleSpec, p: int) -> MomentResult:
    if p < 0 or p > MAX_MOMENT_POWER:
        raise DomainError("moment power out of range", point=p, bound=f"0 <= p <= {MAX_MOMENT_POWER}")
    try:
        value, error = integrate_density(spec, p)
    except QuadratureError as e:
        logger.error(f"Moment p={p} of {spec.label()} failed: {e}")
        raise
    logger.debug(f"m_N({p}) for {spec.label()} = {value} (error estimate {error:.2e})")
    return MomentResult(spec=spec, p=p, value=value, quadrature_error_estimate=error)


# --- Grid evaluation ---------------------------------------------------------


def _pointwise(spec: EnsembleSpec, method: DensityMethod, order: int) -> Callable[[np.ndarray], np.ndarray]:
    if method is DensityMethod.EXACT_KERNEL:
        return lambda chunk: density_exact(spec, chunk)
    if method is DensityMethod.LIMIT_LAW:
        return lambda chunk: ensembles.limiting_density(spec, chunk)
    if method is DensityMethod.CONTOUR_ORACLE:
        return lambda chunk: np.array([contour_oracle.density_via_contour(spec, x) for x in chunk])
    if method is DensityMethod.BULK_ASYMPTOTIC:
        return lambda chunk: np.array([asymptotics.bulk_expansion(spec, x, order).truncated_sum for x in chunk])
    return lambda chunk: np.array([asymptotics.edge_expansion(spec, xi, order).truncated_sum for xi in chunk])


def _check_grid(spec: EnsembleSpec, grid: np.ndarray, method: DensityMethod, order: int) -> None:
    reject_nonfinite(grid)
    if method is DensityMethod.EDGE_ASYMPTOTIC:
        if order > 2:
            raise DomainError("edge expansions stop at order 2", point=order, bound="order <= 2")
        return
    if method is DensityMethod.BULK_ASYMPTOTIC:
        if order > 1:
            raise DomainError("bulk expansions stop at order 1", point=order, bound="order <= 1")
        left, right = ensembles.support(spec)
        reject((grid <= left) | (grid >= right), grid, "bulk expansion needs interior points; use the edge expansion near x = 1", f"{left} < x < {right}")
        return
    if not spec.is_gue:
        reject(grid <= 0, grid, "LUE density is evaluated for x > 0", "x > 0")


def density_curve(spec: EnsembleSpec, grid: Sequence[float], method: DensityMethod, order: int = 0) -> DensityCurve:
    """
    Evaluate a density method on a grid.

    With settings.max_workers > 1 the grid is split into chunks evaluated in
    a thread pool; results are reassembled in grid order.
    """
    points = np.asarray(grid, dtype=float)
    _check_grid(spec, points, method, order)
    evaluate = _pointwise(spec, method, order)

    chunks: List[np.ndarray] = [points[i:i + _CHUNK] for i in range(0, points.size, _CHUNK)]
    if settings.max_workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
            parts = list(pool.map(evaluate, chunks))
    else:
        parts = [evaluate(chunk) for chunk in chunks]
    values = np.concatenate(parts) if parts else np.array([])

    recorded_order = order if method in (DensityMethod.BULK_ASYMPTOTIC, DensityMethod.EDGE_ASYMPTOTIC) else 0
    curve = DensityCurve(
        spec=spec,
        grid=points.tolist(),
        values=values.tolist(),
        method=method,
        order=recorded_order,
    )
    if curve.negative_count:
        logger.warning(f"{curve.negative_count} negative values in {method.value} curve for {spec.label()}")
    return curve
