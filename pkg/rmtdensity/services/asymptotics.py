import logging
import math
from fractions import Fraction

import numpy as np

from rmtdensity.config import settings
from rmtdensity.exceptions import DomainError
from rmtdensity.models.schemas import EnsembleSpec, ExpansionTerms
from rmtdensity.services import ensembles
from rmtdensity.services.arrays import ArrayLike, as_array, reject, restore
from rmtdensity.services.specfun import airy, airy_values

logger = logging.getLogger(__name__)

_BULK_FORMS = ("arccos", "distribution")
ONE_THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)


def _check_bulk_point(spec: EnsembleSpec, x: float) -> None:
    left, right = ensembles.support(spec)
    if not math.isfinite(x) or not left < x < right:
        raise DomainError(
            "bulk expansion needs an interior point; use edge_expansion near the soft edge",
            point=x,
            bound=f"{left} < x < {right}",
        )
    rho = float(ensembles.limiting_density(spec, x))
    if rho < settings.bulk_density_floor:
        raise DomainError(
            "bulk correction diverges as the limiting density vanishes; use edge_expansion",
            point=x,
            bound=f"rho(x) >= {settings.bulk_density_floor}",
        )


def bulk_correction(spec: EnsembleSpec, x: ArrayLike, form: str = "arccos") -> ArrayLike:
    """
    Coefficient of 1/N in the bulk expansion of rho_N(x).

    GUE: -2 cos(2 N pi P) / (pi^3 rho^2).
    LUE: -cos(2 N pi P - phase) / (pi^3 x^2 rho^2) + alpha / (pi^2 x rho), where
    the phase is written either as 2 alpha Arccos(sqrt x) ("arccos") or as
    alpha pi [1 + x rho - P] ("distribution").
    """
    if form not in _BULK_FORMS:
        raise ValueError(f"unknown bulk form {form!r}, expected one of {_BULK_FORMS}")
    values, scalar = as_array(x)
    for point in values:
        _check_bulk_point(spec, float(point))

    n = spec.n
    rho = ensembles.limiting_density(spec, values)
    p = ensembles.distribution_function(spec, values)
    if spec.is_gue:
        return restore(-2.0 * np.cos(2.0 * n * math.pi * p) / (math.pi**3 * rho**2), scalar)

    alpha = spec.alpha
    if form == "arccos":
        phase = 2.0 * alpha * (0.5 * math.pi - np.arcsin(np.sqrt(values)))
    else:
        phase = alpha * math.pi * (1.0 + values * rho - p)
    x_rho = values * rho
    oscillation = np.cos(2.0 * n * math.pi * p - phase) / (math.pi**3 * x_rho**2)
    return restore(-oscillation + alpha / (math.pi**2 * x_rho), scalar)


def bulk_expansion(spec: EnsembleSpec, x: float, order: int = 1, form: str = "arccos") -> ExpansionTerms:
    if order not in (0, 1):
        raise DomainError("bulk expansions stop at order 1", point=order, bound="order in {0, 1}")
    x = float(x)
    _check_bulk_point(spec, x)
    leading = float(ensembles.limiting_density(spec, x))
    if order == 0:
        return ExpansionTerms.from_terms(leading, [])
    correction = float(bulk_correction(spec, x, form)) / spec.n
    return ExpansionTerms.from_terms(leading, [(Fraction(1), correction)])


def edge_limit_density(xi: ArrayLike) -> ArrayLike:
    """Ai'(xi)^2 - xi Ai(xi)^2, clamped at zero against roundoff."""
    values, scalar = as_array(xi)
    ai, ai_prime = airy_values(values)
    return restore(np.maximum(ai_prime**2 - values * ai**2, 0.0), scalar)


def edge_expansion(spec: EnsembleSpec, xi: float, order: int = 2) -> ExpansionTerms:
    """
    Expansion of the edge-scaled density (bN)^(1/3)/2 * rho_N(edge_to_x(xi)).

    The GUE term at N^(-1/3) is identically zero and recorded as such.
    """
    if order not in (0, 1, 2):
        raise DomainError("edge expansions stop at order 2", point=order, bound="order in {0, 1, 2}")
    xi = float(xi)
    if not math.isfinite(xi):
        raise DomainError("edge expansion needs a finite xi", point=xi, bound="finite real")

    pair = airy(xi)
    ai, ai_prime = pair.ai, pair.ai_prime
    leading = max(ai_prime**2 - xi * ai**2, 0.0)
    n = spec.n
    corrections = []

    if order >= 1:
        first = 0.0 if spec.is_gue else spec.alpha / 2.0 ** (1.0 / 3.0) * ai**2 / n ** (1.0 / 3.0)
        corrections.append((ONE_THIRD, first))
    if order >= 2:
        quadratic = 3.0 * xi * xi * ai**2 - 2.0 * xi * ai_prime**2
        if spec.is_gue:
            second = -(quadratic - 3.0 * ai * ai_prime) / 20.0
        else:
            second = 2.0 ** (1.0 / 3.0) / 10.0 * (quadratic + (2.0 - 5.0 * spec.alpha**2) * ai * ai_prime)
        corrections.append((TWO_THIRDS, second / n ** (2.0 / 3.0)))

    return ExpansionTerms.from_terms(leading, corrections)


# --- Matching region ---------------------------------------------------------


def matching_leading_bracket(xi: ArrayLike) -> ArrayLike:
    """2 sqrt|xi|/pi - cos(4|xi|^(3/2)/3)/(2 pi |xi|), for xi < 0."""
    values, scalar = as_array(xi)
    reject(~(values < 0), values, "matching expansions need xi < 0", "xi < 0")
    size = np.abs(values)
    result = 2.0 * np.sqrt(size) / math.pi - np.cos(4.0 * size**1.5 / 3.0) / (2.0 * math.pi * size)
    return restore(result, scalar)


def matching_lue_term(alpha: float, xi: ArrayLike) -> ArrayLike:
    """alpha (1 + sin(4|xi|^(3/2)/3)) / (pi sqrt|xi|); multiplies (2N)^(-1/3)."""
    values, scalar = as_array(xi)
    reject(~(values < 0), values, "matching expansions need xi < 0", "xi < 0")
    size = np.abs(values)
    result = alpha * (1.0 + np.sin(4.0 * size**1.5 / 3.0)) / (math.pi * np.sqrt(size))
    return restore(result, scalar)


def bulk_reexpanded_at_edge(spec: EnsembleSpec, xi: float, n: int) -> float:
    """
    The bulk expansion at x = edge_to_x(xi) re-expanded in N for fixed xi < 0.

    Returned in N^(1/3) rho_N units (GUE) or (2N)^(1/3) rho_N units (LUE):
    twice the edge-scaled density.
    """
    xi = float(xi)
    at_size = EnsembleSpec(kind=spec.kind, alpha=spec.alpha, n=n)
    x = float(ensembles.edge_to_x(at_size, xi))
    left, right = ensembles.support(spec)
    if not xi < 0 or not left < x < right:
        raise DomainError("re-expansion needs xi < 0 mapped inside the bulk", point=xi, bound=f"{left} < edge_to_x(xi) < {right}")

    leading = float(matching_leading_bracket(xi))
    size = abs(xi)
    if spec.is_gue:
        phase = 4.0 * size**1.5 / 3.0
        bracket = size**1.5 / (4.0 * math.pi) + math.cos(phase) / (8.0 * math.pi) + size**1.5 * math.sin(phase) / (20.0 * math.pi)
        return leading - bracket / n ** (2.0 / 3.0)
    return leading + float(matching_lue_term(spec.alpha, xi)) / (2.0 * n) ** (1.0 / 3.0)
