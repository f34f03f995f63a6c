import logging
import math
from fractions import Fraction
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from rmtdensity.exceptions import DomainError
from rmtdensity.models.schemas import AiryPair, EnsembleSpec, WavefunctionSet
from rmtdensity.services.arrays import ArrayLike, as_array, reject, reject_nonfinite

"""
Special functions: log-gamma, weight-folded orthonormal Hermite/Laguerre
wavefunctions, and the Airy pair (Ai, Ai').

Airy evaluation regions:
- Maclaurin series on [-12, 6], summed in exact rational arithmetic
- decaying asymptotic series for xi > 6
- oscillatory asymptotic series for xi < -12
"""

logger = logging.getLogger(__name__)

# Ai(0) and -Ai'(0) to 21 significant digits
AI_ZERO = Fraction("0.355028053887817239260")
AI_PRIME_ZERO = Fraction("0.258819403792806798405")

SERIES_LOWER = -12.0
SERIES_UPPER = 6.0
_SERIES_CUTOFF = Fraction(1, 10**30)
_ASYMPTOTIC_TERMS = 40
_RESCALE_ABOVE = 1e100


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError("log_gamma is defined for positive finite arguments", point=x, bound="x > 0")
    return float(gammaln(x))


# --- Wavefunctions ---------------------------------------------------------


def _hermite_table(n: int, x: np.ndarray) -> np.ndarray:
    u = math.sqrt(2.0 * n) * x
    log_scale = -0.25 * math.log(math.pi) - 0.5 * u * u
    jacobian = (2.0 * n) ** 0.25

    table = np.empty((n, x.size))
    previous = np.zeros_like(u)
    current = np.ones_like(u)
    for k in range(n):
        table[k] = jacobian * current * np.exp(log_scale)
        if k == n - 1:
            break
        following = math.sqrt(2.0 / (k + 1)) * u * current - math.sqrt(k / (k + 1)) * previous
        previous, current = current, following
        big = np.abs(current) > _RESCALE_ABOVE
        if np.any(big):
            factor = np.where(big, np.abs(current), 1.0)
            current = current / factor
            previous = previous / factor
            log_scale = log_scale + np.log(factor)
    return table


def _laguerre_table(n: int, alpha: float, x: np.ndarray, include_power: bool = True) -> np.ndarray:
    u = 4.0 * n * x
    log_scale = -0.5 * u - 0.5 * log_gamma(alpha + 1.0)
    if include_power:
        log_scale = log_scale + 0.5 * alpha * np.log(u)
    jacobian = math.sqrt(4.0 * n)

    table = np.empty((n, x.size))
    previous = np.zeros_like(u)
    current = np.ones_like(u)
    for k in range(n):
        table[k] = jacobian * current * np.exp(log_scale)
        if k == n - 1:
            break
        norm = math.sqrt((k + 1) * (k + 1 + alpha))
        following = ((2 * k + 1 + alpha - u) * current - math.sqrt(k * (k + alpha)) * previous) / norm
        previous, current = current, following
        big = np.abs(current) > _RESCALE_ABOVE
        if np.any(big):
            factor = np.where(big, np.abs(current), 1.0)
            current = current / factor
            previous = previous / factor
            log_scale = log_scale + np.log(factor)
    return table


def wavefunction_table(spec: EnsembleSpec, x: ArrayLike, include_power: bool = True) -> np.ndarray:
    """
    phi_k(x) for k = 0..N-1 at every point of x, shape (N, len(x)).

    phi_k is the degree-k orthonormal polynomial of w_N times sqrt(w_N(x)).
    The three-term recurrence runs in the unit-scale variable (sqrt(2N) x for
    the GUE, 4N x for the LUE) with a per-point log scale that absorbs growth,
    so nothing overflows for N up to 10^3.

    With include_power=False the LUE factor (4N x)^(alpha/2) is left out, which
    keeps the table finite at x = 0 for alpha < 0. The GUE ignores the flag.
    """
    values, _ = as_array(x)
    reject_nonfinite(values)
    if spec.is_gue:
        return _hermite_table(spec.n, values)
    if include_power:
        reject(values <= 0, values, "LUE wavefunctions need x > 0", "x > 0")
    else:
        reject(values < 0, values, "LUE wavefunctions need x >= 0", "x >= 0")
    return _laguerre_table(spec.n, spec.alpha, values, include_power)


def wavefunctions(spec: EnsembleSpec, x: float) -> WavefunctionSet:
    table = wavefunction_table(spec, float(x))
    return WavefunctionSet(spec=spec, x=float(x), values=table[:, 0].tolist())


# --- Airy function -----------------------------------------------------------


def _maclaurin_sums(z: Fraction) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """The two power-series solutions f, g of y'' = z y and their derivatives."""
    cube = z * z * z

    f = term = Fraction(1)
    k = 1
    while True:
        term = term * cube / ((3 * k - 1) * (3 * k))
        f += term
        if abs(term) < _SERIES_CUTOFF:
            break
        k += 1

    f_prime = term = z * z / 2
    k = 2
    while abs(term) >= _SERIES_CUTOFF:
        term = term * cube / ((3 * k - 3) * (3 * k - 1))
        f_prime += term
        k += 1

    g = term = z
    k = 1
    while abs(term) >= _SERIES_CUTOFF or k == 1:
        term = term * cube / ((3 * k) * (3 * k + 1))
        g += term
        k += 1

    g_prime = term = Fraction(1)
    k = 1
    while True:
        term = term * cube / ((3 * k - 2) * (3 * k))
        g_prime += term
        if abs(term) < _SERIES_CUTOFF:
            break
        k += 1

    return f, f_prime, g, g_prime


def airy_maclaurin(xi: float) -> AiryPair:
    """Ai and Ai' from the Maclaurin series; exact rational sums, one final rounding."""
    f, f_prime, g, g_prime = _maclaurin_sums(Fraction(float(xi)))
    ai = AI_ZERO * f - AI_PRIME_ZERO * g
    ai_prime = AI_ZERO * f_prime - AI_PRIME_ZERO * g_prime
    return AiryPair(ai=float(ai), ai_prime=float(ai_prime))


def _asymptotic_coefficients() -> Tuple[np.ndarray, np.ndarray]:
    u = [1.0]
    v = [1.0]
    for k in range(1, _ASYMPTOTIC_TERMS):
        u_k = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        u.append(u_k)
        v.append(-(6 * k + 1) / (6 * k - 1) * u_k)
    return np.array(u), np.array(v)


_U_COEFFS, _V_COEFFS = _asymptotic_coefficients()


def _truncated(terms: np.ndarray) -> float:
    """Sum an asymptotic series up to its smallest term."""
    total = 0.0
    smallest = math.inf
    for term in terms:
        size = abs(term)
        if size > smallest:
            break
        total += term
        smallest = size
        if size <= 1e-17 * abs(total):
            break
    return total


def airy_asymptotic(xi: float) -> AiryPair:
    """Ai and Ai' from the large-|xi| expansions (decaying for xi > 0, oscillatory for xi < 0)."""
    xi = float(xi)
    if xi == 0:
        raise DomainError("asymptotic Airy expansion needs xi != 0", point=xi, bound="xi != 0")
    size = abs(xi)
    zeta = 2.0 / 3.0 * size**1.5
    powers = zeta ** -np.arange(_ASYMPTOTIC_TERMS, dtype=float)
    signs = (-1.0) ** np.arange(_ASYMPTOTIC_TERMS)
    quarter = size**0.25

    if xi > 0:
        decay = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        ai = decay / quarter * _truncated(signs * _U_COEFFS * powers)
        ai_prime = -decay * quarter * _truncated(signs * _V_COEFFS * powers)
        return AiryPair(ai=ai, ai_prime=ai_prime)

    even = slice(0, None, 2)
    odd = slice(1, None, 2)
    alternating = signs[: _ASYMPTOTIC_TERMS // 2]
    u_even = _truncated(alternating * _U_COEFFS[even] * powers[even])
    u_odd = _truncated(alternating * _U_COEFFS[odd] * powers[odd])
    v_even = _truncated(alternating * _V_COEFFS[even] * powers[even])
    v_odd = _truncated(alternating * _V_COEFFS[odd] * powers[odd])

    phase = zeta - 0.25 * math.pi
    cos_phase = math.cos(phase)
    sin_phase = math.sin(phase)
    root_pi = math.sqrt(math.pi)
    ai = (cos_phase * u_even + sin_phase * u_odd) / (root_pi * quarter)
    ai_prime = quarter / root_pi * (sin_phase * v_even - cos_phase * v_odd)
    return AiryPair(ai=ai, ai_prime=ai_prime)


def airy(xi: float) -> AiryPair:
    xi = float(xi)
    if not math.isfinite(xi):
        raise DomainError("Airy function needs a finite real argument", point=xi, bound="finite real")
    if SERIES_LOWER <= xi <= SERIES_UPPER:
        return airy_maclaurin(xi)
    return airy_asymptotic(xi)


def airy_values(xi: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Ai and Ai' over an array of points."""
    values, _ = as_array(xi)
    reject_nonfinite(values)
    pairs = [airy(point) for point in values]
    return np.array([pair.ai for pair in pairs]), np.array([pair.ai_prime for pair in pairs])
