import logging
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from rmtdensity.config import settings
from rmtdensity.exceptions import QuadratureError

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

EPS = float(np.finfo(float).eps)
ROUNDOFF_FACTOR = 50.0


@lru_cache(maxsize=8)
def _rule(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(nodes)


def _panel_sums(f: Integrand, lefts: np.ndarray, rights: np.ndarray, nodes: int) -> np.ndarray:
    """Gauss-Legendre estimate on every panel with a single call to f."""
    t, w = _rule(nodes)
    half = 0.5 * (rights - lefts)
    mid = 0.5 * (rights + lefts)
    points = mid[:, None] + half[:, None] * t[None, :]
    values = np.asarray(f(points.ravel()), dtype=float).reshape(points.shape)
    return half * (values @ w)


def adaptive_gauss_legendre(
    f: Integrand,
    a: float,
    b: float,
    nodes: Optional[int] = None,
    panels: Optional[int] = None,
    abs_tol: Optional[float] = None,
    rel_tol: Optional[float] = None,
    max_depth: Optional[int] = None,
    max_panels: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Integrate a vectorized f over [a, b] by adaptive bisection.

    Each panel's Gauss-Legendre value is compared with the sum over its two
    halves; panels whose difference is within their share of the tolerance
    are accepted, the rest are split. A difference within 50 eps of the
    panel value is roundoff and always accepted. Every pending panel of one
    depth is evaluated in a single call to f.

    Raises QuadratureError past max_depth bisections or once more than
    max_panels panels are pending.

    Returns (value, error estimate), the estimate being the summed
    coarse/fine differences of the accepted panels.
    """
    nodes = nodes or settings.quadrature_nodes
    panels = panels or settings.quadrature_panels
    abs_tol = settings.quadrature_abs_tolerance if abs_tol is None else abs_tol
    rel_tol = settings.quadrature_rel_tolerance if rel_tol is None else rel_tol
    max_depth = settings.quadrature_max_depth if max_depth is None else max_depth
    max_panels = max_panels or settings.quadrature_max_panels

    if not b > a:
        raise ValueError(f"integration interval must satisfy a < b, got [{a}, {b}]")

    edges = np.linspace(a, b, panels + 1)
    lefts, rights = edges[:-1], edges[1:]
    coarse = _panel_sums(f, lefts, rights, nodes)
    scale = abs(float(np.sum(coarse)))
    length = b - a

    value = 0.0
    error = 0.0
    for depth in range(max_depth + 1):
        mids = 0.5 * (lefts + rights)
        left_half = _panel_sums(f, lefts, mids, nodes)
        right_half = _panel_sums(f, mids, rights, nodes)
        fine = left_half + right_half
        diff = np.abs(fine - coarse)

        scale = max(scale, abs(value + float(np.sum(fine))))
        allowed = np.maximum(max(abs_tol, rel_tol * scale) * (rights - lefts) / length, ROUNDOFF_FACTOR * EPS * np.abs(fine))
        done = diff <= allowed

        value += float(np.sum(fine[done]))
        error += float(np.sum(diff[done]))
        if np.all(done):
            logger.debug(f"Quadrature on [{a}, {b}] converged at depth {depth}")
            return value, error

        keep = ~done
        lefts = np.concatenate([lefts[keep], mids[keep]])
        rights = np.concatenate([mids[keep], rights[keep]])
        coarse = np.concatenate([left_half[keep], right_half[keep]])
        if lefts.size > max_panels:
            pending = float(np.sum(diff[keep]))
            logger.error(f"Quadrature on [{a}, {b}] needs more than {max_panels} panels at depth {depth}")
            raise QuadratureError(f"adaptive quadrature on [{a}, {b}] exceeded {max_panels} panels", estimate=error + pending)

    pending = float(np.sum(np.abs(diff[~done])))
    logger.error(f"Quadrature on [{a}, {b}] did not converge in {max_depth} bisections")
    raise QuadratureError(f"adaptive quadrature on [{a}, {b}] exceeded depth {max_depth}", estimate=error + pending)
