import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

"""
rmtdensity Models - Pydantic Data Models

Data models for the GUE/LUE eigenvalue-density library.
All models use Pydantic for validation on construction, so every invariant of
a domain type is checked where the value is built rather than where it is used.

Model Categories:
- Ensembles: EnsembleKind, EnsembleSpec
- Saddle points: SaddleData
- Special functions: AiryPair, WavefunctionSet
- Densities: DensityMethod, DensityCurve, MomentResult
- Contour oracle: ContourSpec
- Expansions: ExpansionTerm, ExpansionTerms
- Reports: ScalingRow, OracleReport, FigureDataset
- CLI: CommandName, OutputFormat, FigureName, RunConfig
"""


class EnsembleKind(str, Enum):
    GUE = "gue"
    LUE = "lue"


class EnsembleSpec(BaseModel):
    """Ensemble kind, Laguerre exponent (LUE only) and matrix size N."""

    model_config = ConfigDict(frozen=True)

    kind: EnsembleKind
    alpha: float = 0.0
    n: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_alpha(self) -> "EnsembleSpec":
        if not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha}")
        if self.kind is EnsembleKind.LUE and self.alpha <= -1:
            raise ValueError(f"LUE requires alpha > -1 for an integrable weight, got {self.alpha}")
        return self

    @property
    def is_gue(self) -> bool:
        return self.kind is EnsembleKind.GUE

    def label(self) -> str:
        if self.is_gue:
            return f"GUE(N={self.n})"
        return f"LUE(alpha={self.alpha}, N={self.n})"


class SaddleData(BaseModel):
    """
    Saddle points of S(z, x) for a bulk point x.

    s_second_deriv_plus holds S''(z_+, x)/2, the quantity whose modulus and
    argument classify the saddle.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    z_plus: complex
    z_minus: complex
    s_second_deriv_plus: complex
    re_s_plus: float
    im_s_plus: float

    @model_validator(mode="after")
    def _check_conjugate(self) -> "SaddleData":
        if self.z_minus != self.z_plus.conjugate():
            raise ValueError("z_minus must equal the conjugate of z_plus")
        return self


class AiryPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    ai: float
    ai_prime: float


class WavefunctionSet(BaseModel):
    """Weight-folded orthonormal functions phi_0(x) ... phi_{N-1}(x)."""

    spec: EnsembleSpec
    x: float
    values: List[float]

    @model_validator(mode="after")
    def _check_length(self) -> "WavefunctionSet":
        if len(self.values) != self.spec.n:
            raise ValueError(f"expected {self.spec.n} wavefunction values, got {len(self.values)}")
        return self


class DensityMethod(str, Enum):
    EXACT_KERNEL = "exact_kernel"
    CONTOUR_ORACLE = "contour_oracle"
    BULK_ASYMPTOTIC = "bulk_asymptotic"
    EDGE_ASYMPTOTIC = "edge_asymptotic"
    LIMIT_LAW = "limit_law"


class DensityCurve(BaseModel):
    """
    Density values on a grid with provenance.

    For edge_asymptotic the grid holds soft-edge variables xi and the values
    are the edge-scaled density; every other method uses x and rho_N(x).
    Raw values are kept as computed: negatives from asymptotic truncation are
    counted in negative_count, never clamped here.
    """

    spec: EnsembleSpec
    grid: List[float]
    values: List[float]
    method: DensityMethod
    order: int = Field(default=0, ge=0)
    negative_count: int = 0

    @field_validator("grid")
    @classmethod
    def _check_grid(cls, grid: List[float]) -> List[float]:
        if not grid:
            raise ValueError("grid must not be empty")
        for left, right in zip(grid, grid[1:]):
            if not right > left:
                raise ValueError(f"grid must be strictly increasing, found {left} followed by {right}")
        return grid

    @model_validator(mode="after")
    def _check_values(self) -> "DensityCurve":
        if len(self.values) != len(self.grid):
            raise ValueError(f"{len(self.values)} values for a grid of {len(self.grid)} points")
        for x, value in zip(self.grid, self.values):
            if not math.isfinite(value):
                raise ValueError(f"non-finite density {value} at {x}")
        self.negative_count = sum(1 for value in self.values if value < 0.0)
        return self


class MomentResult(BaseModel):
    spec: EnsembleSpec
    p: int = Field(ge=0)
    value: float
    quadrature_error_estimate: float = Field(ge=0.0)

    @field_validator("value")
    @classmethod
    def _check_value(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"moment must be finite, got {value}")
        return value


class ContourSpec(BaseModel):
    """
    Circle centred at the origin used by the contour oracle.

    With no radius the circle passes through the saddle points of the action
    at each x: |z| = 1 for the GUE, |z| = 1/sqrt(x) for the LUE capped below
    the branch point at z = -2.
    """

    model_config = ConfigDict(frozen=True)

    radius: Optional[float] = Field(default=None, gt=0.0)
    num_points: int = Field(default=512, ge=64)

    @field_validator("num_points")
    @classmethod
    def _check_even(cls, num_points: int) -> int:
        if num_points % 2:
            raise ValueError(f"num_points must be even, got {num_points}")
        return num_points


class ExpansionTerm(BaseModel):
    """One correction: its value already carries the factor N^(-order)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    order: Fraction
    value: float

    @field_serializer("order")
    def _serialize_order(self, order: Fraction) -> str:
        return str(order)


class ExpansionTerms(BaseModel):
    leading: float
    corrections: List[ExpansionTerm] = []
    truncated_sum: float

    @model_validator(mode="after")
    def _check_bookkeeping(self) -> "ExpansionTerms":
        orders = [term.order for term in self.corrections]
        for lower, upper in zip(orders, orders[1:]):
            if not upper > lower:
                raise ValueError(f"correction orders must increase, found {lower} then {upper}")
        expected = self.leading + sum(term.value for term in self.corrections)
        if abs(expected - self.truncated_sum) > 1e-15 * max(1.0, abs(expected)):
            raise ValueError(f"truncated_sum {self.truncated_sum} differs from term sum {expected}")
        return self

    @classmethod
    def from_terms(cls, leading: float, corrections: List[Tuple[Fraction, float]]) -> "ExpansionTerms":
        terms = [ExpansionTerm(order=order, value=value) for order, value in corrections]
        total = leading + sum(term.value for term in terms)
        return cls(leading=leading, corrections=terms, truncated_sum=total)

    def coefficient(self, order: Fraction) -> Optional[float]:
        for term in self.corrections:
            if term.order == order:
                return term.value
        return None


class CommandName(str, Enum):
    EXACT = "exact"
    BULK = "bulk"
    EDGE = "edge"
    MATCH = "match"
    ORACLE_CHECK = "oracle-check"
    MOMENTS = "moments"
    FIGURE = "figure"
    SCALING_REPORT = "scaling-report"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class FigureName(str, Enum):
    GUE_BULK = "gue-bulk"
    LUE_BULK = "lue-bulk"
    GUE_EDGE = "gue-edge"
    LUE_EDGE = "lue-edge"
    ALL = "all"


# Default x ranges per (command, ensemble) when --xmin/--xmax are omitted
DEFAULT_X_RANGES = {
    (CommandName.EXACT, EnsembleKind.GUE): (-1.2, 1.2),
    (CommandName.EXACT, EnsembleKind.LUE): (0.0, 1.5),
    (CommandName.BULK, EnsembleKind.GUE): (-0.9, 0.9),
    (CommandName.BULK, EnsembleKind.LUE): (0.1, 0.9),
    (CommandName.ORACLE_CHECK, EnsembleKind.GUE): (-0.85, 0.85),
    (CommandName.ORACLE_CHECK, EnsembleKind.LUE): (0.25, 0.85),
}
DEFAULT_XI_RANGES = {
    CommandName.MATCH: (-6.0, -1.0),
}
DEFAULT_POINTS = {
    CommandName.ORACLE_CHECK: 50,
    CommandName.MATCH: 51,
}
DEFAULT_ORDERS = {
    CommandName.EDGE: 2,
}


class RunConfig(BaseModel):
    """
    Validated CLI invocation; built from parsed flags before any computation.

    Grid bounds left unset fall back to per-command defaults, so the resolved
    values are what get validated and echoed.
    """

    command: CommandName
    ensemble: EnsembleKind = EnsembleKind.GUE
    alpha: float = 0.0
    n: int = Field(default=10, ge=1)
    xmin: Optional[float] = None
    xmax: Optional[float] = None
    points: Optional[int] = Field(default=None, ge=2)
    ximin: Optional[float] = None
    ximax: Optional[float] = None
    order: Optional[int] = Field(default=None, ge=0)
    output_format: OutputFormat = OutputFormat.CSV
    out: Optional[Path] = None
    which: FigureName = FigureName.ALL
    pmax: int = Field(default=4, ge=0, le=20)
    epsilon: float = Field(default=1e-6, gt=0.0)
    radius: Optional[float] = Field(default=None, gt=0.0)
    contour_points: int = Field(default=512, ge=64)
    tolerance: float = Field(default=1e-6, gt=0.0)

    @model_validator(mode="after")
    def _check_combination(self) -> "RunConfig":
        x_default = DEFAULT_X_RANGES.get((self.command, self.ensemble), (-1.0, 1.0))
        xi_default = DEFAULT_XI_RANGES.get(self.command, (-4.0, 4.0))
        if self.xmin is None:
            self.xmin = x_default[0]
        if self.xmax is None:
            self.xmax = x_default[1]
        if self.ximin is None:
            self.ximin = xi_default[0]
        if self.ximax is None:
            self.ximax = xi_default[1]
        if self.points is None:
            self.points = DEFAULT_POINTS.get(self.command, 201)
        if self.order is None:
            self.order = DEFAULT_ORDERS.get(self.command, 1)

        for name in ("alpha", "xmin", "xmax", "ximin", "ximax"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"--{name} must be finite")
        if self.ensemble is EnsembleKind.LUE and self.alpha <= -1:
            raise ValueError(f"--alpha must exceed -1 for the LUE, got {self.alpha}")
        if self.xmin >= self.xmax:
            raise ValueError(f"--xmin ({self.xmin}) must be below --xmax ({self.xmax})")
        if self.ximin >= self.ximax:
            raise ValueError(f"--ximin ({self.ximin}) must be below --ximax ({self.ximax})")
        if self.command is CommandName.BULK and self.order > 1:
            raise ValueError(f"bulk expansions stop at order 1, got --order {self.order}")
        if self.command is CommandName.EDGE and self.order > 2:
            raise ValueError(f"edge expansions stop at order 2, got --order {self.order}")
        if self.command is CommandName.MATCH and self.ximax >= 0:
            raise ValueError(f"match needs a negative xi grid, got --ximax {self.ximax}")
        if self.contour_points % 2:
            raise ValueError(f"--contour-points must be even, got {self.contour_points}")
        return self

    def spec(self) -> EnsembleSpec:
        return EnsembleSpec(kind=self.ensemble, alpha=self.alpha, n=self.n)

    def echo(self) -> dict:
        payload = self.model_dump(mode="json")
        payload.pop("out", None)
        return payload


class ScalingRow(BaseModel):
    """
    One line of the error-scaling report.

    For ratio criteria `ratio` is error_small/error_large; for single-point
    checks it is the measured quantity itself and n_small == n_large.
    """

    criterion: str
    ensemble: str
    n_small: int
    n_large: int
    error_small: float
    error_large: float
    ratio: float
    lower: float
    upper: float
    verdict: str = ""

    @model_validator(mode="after")
    def _set_verdict(self) -> "ScalingRow":
        self.verdict = "PASS" if self.lower <= self.ratio <= self.upper else "FAIL"
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


class OracleReport(BaseModel):
    """Kernel vs contour densities on a grid."""

    spec: EnsembleSpec
    grid: List[float]
    kernel: List[float]
    contour: List[float]
    rel_gap: List[float]
    tolerance: float

    @property
    def max_rel_gap(self) -> float:
        return max(self.rel_gap) if self.rel_gap else 0.0

    @property
    def passed(self) -> bool:
        return self.max_rel_gap <= self.tolerance


class FigureDataset(BaseModel):
    """
    Exact vs asymptotic density for one figure setup.

    Exported rows clamp negative asymptotic values at zero for plotting; the
    abs_error column and negative_count keep the raw values.
    """

    name: FigureName
    spec: EnsembleSpec
    abscissa: str
    grid: List[float]
    exact: List[float]
    asymptotic: List[float]
    limit: Optional[List[float]] = None

    @property
    def abs_error(self) -> List[float]:
        return [abs(e - a) for e, a in zip(self.exact, self.asymptotic)]

    @property
    def max_abs_error(self) -> float:
        return max(self.abs_error)

    @property
    def negative_count(self) -> int:
        return sum(1 for value in self.asymptotic if value < 0)

    def columns(self) -> List[str]:
        names = [self.abscissa, "exact", "asymptotic", "abs_error"]
        if self.limit is not None:
            names.append("limit")
        return names

    def rows(self) -> List[List[float]]:
        plotted = [max(value, 0.0) for value in self.asymptotic]
        columns = [self.grid, self.exact, plotted, self.abs_error]
        if self.limit is not None:
            columns.append(self.limit)
        return [list(row) for row in zip(*columns)]
