import cmath
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator


def _wrap_phase(phase: float) -> float:
    """Map an angle into (-pi, pi]."""
    wrapped = math.remainder(phase, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


class ScaledComplex(BaseModel):
    """
    Complex number stored as (log|w|, arg w).

    Carries e^{N S} sized quantities through the contour oracle without
    overflow. Zero is log_mag = -inf with phase 0.
    """

    model_config = ConfigDict(frozen=True)

    log_mag: float
    phase: float = 0.0

    @field_validator("phase")
    @classmethod
    def _normalize_phase(cls, phase: float) -> float:
        return _wrap_phase(phase)

    @classmethod
    def zero(cls) -> "ScaledComplex":
        return cls(log_mag=-math.inf, phase=0.0)

    @classmethod
    def sum_of_logs(cls, log_terms: np.ndarray) -> "ScaledComplex":
        """
        Sum of exp(log_terms) for a complex array of logarithms.

        The largest real part is peeled off before exponentiating and added back
        in log space.
        """
        log_terms = np.asarray(log_terms, dtype=complex)
        peel = float(np.max(log_terms.real))
        if not math.isfinite(peel):
            return cls.zero()
        total = complex(np.sum(np.exp(log_terms - peel)))
        if total == 0:
            return cls.zero()
        return cls(log_mag=peel + math.log(abs(total)), phase=cmath.phase(total))

    @property
    def is_zero(self) -> bool:
        return self.log_mag == -math.inf

    def __mul__(self, other: "ScaledComplex") -> "ScaledComplex":
        if self.is_zero or other.is_zero:
            return ScaledComplex.zero()
        return ScaledComplex(log_mag=self.log_mag + other.log_mag, phase=self.phase + other.phase)

    def scale(self, log_factor: float) -> "ScaledComplex":
        """Multiply by the positive real exp(log_factor)."""
        if self.is_zero:
            return self
        return ScaledComplex(log_mag=self.log_mag + log_factor, phase=self.phase)

    def __neg__(self) -> "ScaledComplex":
        if self.is_zero:
            return self
        return ScaledComplex(log_mag=self.log_mag, phase=self.phase + math.pi)

    def __add__(self, other: "ScaledComplex") -> "ScaledComplex":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        peel = max(self.log_mag, other.log_mag)
        total = (
            cmath.rect(math.exp(self.log_mag - peel), self.phase)
            + cmath.rect(math.exp(other.log_mag - peel), other.phase)
        )
        if total == 0:
            return ScaledComplex.zero()
        return ScaledComplex(log_mag=peel + math.log(abs(total)), phase=cmath.phase(total))

    def __sub__(self, other: "ScaledComplex") -> "ScaledComplex":
        return self + (-other)
