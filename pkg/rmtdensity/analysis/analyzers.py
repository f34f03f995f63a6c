import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from rmtdensity.config import settings
from rmtdensity.exceptions import RMTDensityError
from rmtdensity.models.schemas import ContourSpec, EnsembleKind, EnsembleSpec, OracleReport, ScalingRow
from rmtdensity.services import asymptotics, contour_oracle, exact_density
from rmtdensity.services.specfun import airy

logger = logging.getLogger(__name__)

BULK_GRID_POINTS = 101
EDGE_GRID_POINTS = 41
BULK_RATIO_BOUNDS = (3.0, 5.5)
EDGE_RATIO_BOUNDS = (1.5, 2.8)
EDGE_POINT_TOLERANCE = 5e-4
MATCH_BULK_TOLERANCE = 2e-3
MATCH_XI = (-4.0, -5.0, -6.0)
LUE_BULK_SIZES = (20, 40)


def bulk_grid(spec: EnsembleSpec, points: int = BULK_GRID_POINTS) -> np.ndarray:
    if spec.is_gue:
        return np.linspace(-0.6, 0.6, points)
    return np.linspace(0.2, 0.8, points)


def edge_grid(points: int = EDGE_GRID_POINTS) -> np.ndarray:
    return np.linspace(-2.0, 2.0, points)


class ScalingAnalyzer:
    """
    Error-scaling analysis of the asymptotic expansions against the exact density.

    Features:
    - Bulk remainder E(N): max |order-1 bulk expansion - exact| on the bulk grid
    - Edge remainder E~(N): max |order-2 edge expansion - exact| on xi in [-2, 2]
    - Ratio criteria E(N)/E(2N) with PASS/FAIL verdicts (LUE bulk at N = 20, 40)
    - Single-point edge check and matching-region checks
    """

    def __init__(
        self,
        n_small: int = 10,
        n_large: int = 20,
        lue_alpha: float = 0.5,
        lue_bulk_sizes: Tuple[int, int] = LUE_BULK_SIZES,
    ):
        self.n_small = n_small
        self.n_large = n_large
        self.lue_alpha = lue_alpha
        self.lue_bulk_sizes = lue_bulk_sizes

    def _spec(self, kind: EnsembleKind, n: int) -> EnsembleSpec:
        alpha = 0.0 if kind is EnsembleKind.GUE else self.lue_alpha
        return EnsembleSpec(kind=kind, alpha=alpha, n=n)

    def _label(self, kind: EnsembleKind) -> str:
        return "GUE" if kind is EnsembleKind.GUE else f"LUE(alpha={self.lue_alpha})"

    def bulk_error(self, spec: EnsembleSpec) -> float:
        grid = bulk_grid(spec)
        exact = exact_density.density_exact(spec, grid)
        expansion = np.array([asymptotics.bulk_expansion(spec, x, 1).truncated_sum for x in grid])
        return float(np.max(np.abs(expansion - exact)))

    def edge_error(self, spec: EnsembleSpec) -> float:
        grid = edge_grid()
        exact = exact_density.edge_scaled_exact(spec, grid)
        expansion = np.array([asymptotics.edge_expansion(spec, xi, 2).truncated_sum for xi in grid])
        return float(np.max(np.abs(expansion - exact)))

    def _ratio_row(self, criterion: str, kind: EnsembleKind, measure, bounds, sizes: Optional[Tuple[int, int]] = None) -> ScalingRow:
        n_small, n_large = sizes or (self.n_small, self.n_large)
        small = measure(self._spec(kind, n_small))
        large = measure(self._spec(kind, n_large))
        row = ScalingRow(
            criterion=criterion,
            ensemble=self._label(kind),
            n_small=n_small,
            n_large=n_large,
            error_small=small,
            error_large=large,
            ratio=small / large,
            lower=bounds[0],
            upper=bounds[1],
        )
        logger.info(f"{criterion} {row.ensemble}: ratio {row.ratio:.3f} -> {row.verdict}")
        return row

    def edge_point_row(self) -> ScalingRow:
        spec = self._spec(EnsembleKind.GUE, 10)
        gap = abs(asymptotics.edge_expansion(spec, 0.0, 2).truncated_sum - float(exact_density.edge_scaled_exact(spec, 0.0)))
        return ScalingRow(
            criterion="edge-point",
            ensemble="GUE",
            n_small=10,
            n_large=10,
            error_small=gap,
            error_large=gap,
            ratio=gap,
            lower=0.0,
            upper=EDGE_POINT_TOLERANCE,
        )

    def matching_bulk_row(self, n: int = 40, xi: float = -6.0) -> ScalingRow:
        """Bulk expansion at the mapped point vs its re-expansion, in density units."""
        spec = self._spec(EnsembleKind.GUE, n)
        x = 1.0 + xi / (2.0 * n ** (2.0 / 3.0))
        bulk = asymptotics.bulk_expansion(spec, x, 1).truncated_sum
        reexpanded = asymptotics.bulk_reexpanded_at_edge(spec, xi, n) / n ** (1.0 / 3.0)
        gap = abs(bulk - reexpanded)
        return ScalingRow(
            criterion="match-bulk",
            ensemble="GUE",
            n_small=n,
            n_large=n,
            error_small=gap,
            error_large=gap,
            ratio=gap,
            lower=0.0,
            upper=MATCH_BULK_TOLERANCE,
        )

    def matching_limit_row(self, xis: Sequence[float] = MATCH_XI) -> ScalingRow:
        """Fitted constant C in |2 K(xi) - bracket| <= C |xi|^(-5/2)."""
        constants = [
            abs(2.0 * asymptotics.edge_limit_density(xi) - asymptotics.matching_leading_bracket(xi)) * abs(xi) ** 2.5
            for xi in xis
        ]
        worst = max(constants)
        return ScalingRow(
            criterion="match-limit",
            ensemble="any",
            n_small=0,
            n_large=0,
            error_small=worst,
            error_large=worst,
            ratio=worst,
            lower=0.0,
            upper=1.0,
        )

    def matching_lue_row(self, alphas: Sequence[float] = (0.5, 2.0), xis: Sequence[float] = MATCH_XI) -> ScalingRow:
        """Fitted constant C in |2 alpha Ai(xi)^2 - lue term| <= C alpha xi^(-2)."""
        constants = []
        for alpha in alphas:
            for xi in xis:
                ai = airy(xi).ai
                gap = abs(2.0 * alpha * ai * ai - asymptotics.matching_lue_term(alpha, xi))
                constants.append(gap * xi * xi / alpha)
        worst = max(constants)
        return ScalingRow(
            criterion="match-lue-term",
            ensemble="LUE",
            n_small=0,
            n_large=0,
            error_small=worst,
            error_large=worst,
            ratio=worst,
            lower=0.0,
            upper=1.0,
        )

    def report(self) -> List[ScalingRow]:
        rows = [
            self._ratio_row("bulk-scaling", EnsembleKind.GUE, self.bulk_error, BULK_RATIO_BOUNDS),
            self._ratio_row(
                "bulk-scaling", EnsembleKind.LUE, self.bulk_error, BULK_RATIO_BOUNDS, self.lue_bulk_sizes
            ),
            self._ratio_row("edge-scaling", EnsembleKind.GUE, self.edge_error, EDGE_RATIO_BOUNDS),
            self._ratio_row("edge-scaling", EnsembleKind.LUE, self.edge_error, EDGE_RATIO_BOUNDS),
            self.edge_point_row(),
            self.matching_bulk_row(),
            self.matching_limit_row(),
            self.matching_lue_row(),
        ]
        failed = [row.criterion for row in rows if not row.passed]
        if failed:
            logger.warning(f"Scaling report failures: {failed}")
        return rows


class OracleChecker:
    """
    Cross-validates the exact kernel density against the contour-integral oracle.

    Features:
    - Pointwise relative gap on a bulk grid
    - Contour radius and point count taken from the caller or settings
    """

    def __init__(self, contour: Optional[ContourSpec] = None, tolerance: Optional[float] = None):
        self.contour = contour or ContourSpec(radius=settings.contour_radius, num_points=settings.contour_points)
        self.tolerance = settings.oracle_tolerance if tolerance is None else tolerance

    def compare(self, spec: EnsembleSpec, grid: Sequence[float]) -> OracleReport:
        points = np.asarray(grid, dtype=float)
        try:
            kernel = np.asarray(exact_density.density_exact(spec, points))
            contour = np.array([contour_oracle.density_via_contour(spec, x, self.contour) for x in points])
        except RMTDensityError as e:
            logger.error(f"Oracle comparison failed for {spec.label()}: {e}")
            raise
        gaps = np.abs(contour - kernel) / np.abs(kernel)
        report = OracleReport(
            spec=spec,
            grid=points.tolist(),
            kernel=kernel.tolist(),
            contour=contour.tolist(),
            rel_gap=gaps.tolist(),
            tolerance=self.tolerance,
        )
        logger.info(f"Oracle check {spec.label()}: max relative gap {report.max_rel_gap:.3e}")
        return report
