import logging
import math
from typing import Optional, Union

import numpy as np

from rmtdensity.config import settings
from rmtdensity.exceptions import ContourConfigError, DomainError, PoleError, QuadratureError
from rmtdensity.models.scaled import ScaledComplex
from rmtdensity.models.schemas import ContourSpec, EnsembleSpec
from rmtdensity.services import ensembles
from rmtdensity.services.quadrature import adaptive_gauss_legendre
from rmtdensity.services.specfun import airy

"""
Contour-integral oracle for rho_N(x).

rho_N(x) = [2 c_0 c_1 / ||pi_{N-1}||^2] w_N(x) J_N(x), with

    J_N(x) = oint oint e^{N[S(z1,x) + S(z2,x)]} G(z1, z2) dz1 dz2 / (2 pi i)^2
    G(z1, z2) = u(z1) u(z2) (1 - z1/z2)

G separates, so J_N = I_0^2 - I_1 I_{-1} with I_k = oint e^{N S} u z^k dz/(2 pi i).
Each I_k is a trapezoid sum on a circle, carried in log space.
"""

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, np.ndarray]

RAY_LENGTH = 8.0
RAY_MAX_POWER = 4
# trapezoid aliasing on |z| = r decays like (r/2)^M for the LUE
LUE_MAX_RADIUS = 1.7


def _check_poles(spec: EnsembleSpec, z: np.ndarray) -> None:
    if np.any(z == 0):
        raise PoleError("the action has a logarithmic pole at z = 0", point=0.0, bound="z != 0")
    if not spec.is_gue and np.any(z == -2):
        raise PoleError("the LUE action has a logarithmic pole at z = -2", point=-2.0, bound="z != -2")


def action(spec: EnsembleSpec, z: ComplexLike, x: float) -> ComplexLike:
    """S(z, x) with principal logarithms."""
    values = np.asarray(z, dtype=complex)
    _check_poles(spec, values)
    result = -2.0 * values * x - np.log(values)
    if spec.is_gue:
        result = result - 0.5 * values * values
    else:
        result = result + np.log(1.0 + 0.5 * values)
    return complex(result) if result.ndim == 0 else result


def action_second_derivative(spec: EnsembleSpec, z: ComplexLike) -> ComplexLike:
    values = np.asarray(z, dtype=complex)
    _check_poles(spec, values)
    if spec.is_gue:
        result = 1.0 / values**2 - 1.0
    else:
        result = 1.0 / values**2 - 1.0 / (values + 2.0) ** 2
    return complex(result) if result.ndim == 0 else result


def _log_u(spec: EnsembleSpec, z: np.ndarray) -> np.ndarray:
    if spec.is_gue:
        return np.zeros_like(z)
    return (spec.alpha - 1.0) * np.log(1.0 + 0.5 * z)


def integrand_g(spec: EnsembleSpec, z1: complex, z2: complex) -> complex:
    """G(z1, z2) = u(z1) u(z2) (1 - z1/z2)."""
    first = np.asarray(z1, dtype=complex)
    second = np.asarray(z2, dtype=complex)
    if np.any(second == 0):
        raise PoleError("G has a pole at z2 = 0", point=0.0, bound="z2 != 0")
    if not spec.is_gue and (np.any(first == -2) or np.any(second == -2)):
        raise PoleError("u has a branch point at z = -2", point=-2.0, bound="z != -2")
    log_u = _log_u(spec, first) + _log_u(spec, second)
    result = np.exp(log_u) * (1.0 - first / second)
    return complex(result) if result.ndim == 0 else result


def _validate_contour(spec: EnsembleSpec, contour: ContourSpec) -> None:
    if spec.n > settings.contour_max_n:
        raise ContourConfigError(f"contour oracle is limited to N <= {settings.contour_max_n}, got N={spec.n}")
    if not spec.is_gue and contour.radius is not None and contour.radius >= 2.0:
        raise ContourConfigError(f"LUE contour must not enclose z = -2, got radius {contour.radius}")


def contour_radius(spec: EnsembleSpec, x: float, contour: ContourSpec) -> float:
    """Explicit radius, or |z| = sqrt(|z+ z-|), which runs through both saddles of S(., x) inside the support."""
    if contour.radius is not None:
        return contour.radius
    if spec.is_gue or x <= 0:
        return 1.0
    return min(1.0 / math.sqrt(x), LUE_MAX_RADIUS)


def contour_moment(spec: EnsembleSpec, x: float, k: int, contour: ContourSpec) -> ScaledComplex:
    """oint e^{N S(z,x)} u(z) z^k dz/(2 pi i) by the trapezoid rule on a circle about the origin."""
    m = contour.num_points
    theta = 2.0 * math.pi * np.arange(m) / m
    z = contour_radius(spec, x, contour) * np.exp(1j * theta)
    # dz/(2 pi i) = z dtheta/(2 pi)
    log_terms = spec.n * action(spec, z, x) + _log_u(spec, z) + (k + 1) * np.log(z)
    return ScaledComplex.sum_of_logs(log_terms).scale(-math.log(m))


def j_integral(spec: EnsembleSpec, x: float, contour: ContourSpec) -> ScaledComplex:
    i_zero = contour_moment(spec, x, 0, contour)
    i_plus = contour_moment(spec, x, 1, contour)
    i_minus = contour_moment(spec, x, -1, contour)
    return i_zero * i_zero - i_plus * i_minus


def density_via_contour(spec: EnsembleSpec, x: float, contour: Optional[ContourSpec] = None) -> float:
    if contour is None:
        contour = ContourSpec(radius=settings.contour_radius, num_points=settings.contour_points)
    _validate_contour(spec, contour)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("density needs a finite x", point=x, bound="finite real")
    if not spec.is_gue and x <= 0:
        raise DomainError("LUE density is evaluated for x > 0", point=x, bound="x > 0")

    if spec.is_gue:
        log_weight = -2.0 * spec.n * x * x
    else:
        log_weight = spec.alpha * math.log(x) - 4.0 * spec.n * x

    j_value = j_integral(spec, x, contour)
    if j_value.is_zero:
        return 0.0
    residue = abs(math.sin(j_value.phase))
    if residue > settings.contour_imag_tolerance:
        logger.error(f"Contour density for {spec.label()} at x={x} has imaginary residue {residue:.2e}")
        raise QuadratureError(f"contour integral not real at x={x} for {spec.label()}", estimate=residue)

    log_density = ensembles.log_prefactor(spec) + log_weight + j_value.log_mag
    logger.debug(f"Contour density at x={x}: log|J|={j_value.log_mag:.6f}, phase={j_value.phase:.3e}")
    return math.exp(log_density) * math.cos(j_value.phase)


# --- Airy ray integral -------------------------------------------------------


def _check_ray_parameters(m: int, n_param: int, b: float) -> None:
    if not 0 <= m <= RAY_MAX_POWER:
        raise DomainError("ray integral power out of range", point=m, bound=f"0 <= m <= {RAY_MAX_POWER}")
    if n_param < 1:
        raise DomainError("ray integral needs N >= 1", point=n_param, bound="N >= 1")
    if not b > 0:
        raise DomainError("ray integral needs b > 0", point=b, bound="b > 0")


def airy_ray_integral(m: int, n_param: int, b: float, xi: float) -> float:
    """
    int_B z^m exp(b N z^3/3 - xi b^(1/3) N^(1/3) z) dz/(2 pi i).

    B runs in from infinity along arg z = -pi/3 and out along arg z = pi/3,
    truncated at length 8. The integrand is real on the real axis, so the two
    rays are conjugate and the result is Im(upper ray)/pi.
    """
    _check_ray_parameters(m, n_param, b)
    cubic = b * n_param / 3.0
    linear = xi * (b * n_param) ** (1.0 / 3.0)
    direction = complex(0.5, 0.5 * math.sqrt(3.0))

    def upper_ray(t: np.ndarray) -> np.ndarray:
        z = t * direction
        return np.imag(z**m * np.exp(cubic * z**3 - linear * z) * direction)

    value, _ = adaptive_gauss_legendre(upper_ray, 0.0, RAY_LENGTH)
    return value / math.pi


def lemma_rhs(m: int, n_param: int, b: float, xi: float) -> float:
    """(-1)^m (bN)^(-(m+1)/3) Ai^(m)(xi), higher derivatives reduced with Ai'' = xi Ai."""
    _check_ray_parameters(m, n_param, b)
    pair = airy(xi)
    derivatives = [
        pair.ai,
        pair.ai_prime,
        xi * pair.ai,
        pair.ai + xi * pair.ai_prime,
        2.0 * pair.ai_prime + xi * xi * pair.ai,
    ]
    return (-1) ** m * (b * n_param) ** (-(m + 1) / 3.0) * derivatives[m]
