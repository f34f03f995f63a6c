import logging
from typing import Dict, List

import numpy as np

from rmtdensity.models.schemas import EnsembleKind, EnsembleSpec, FigureDataset, FigureName
from rmtdensity.services import asymptotics, exact_density

logger = logging.getLogger(__name__)

FIGURE_POINTS = 201

# name -> (ensemble, alpha, N, abscissa, grid bounds)
FIGURE_SETUPS: Dict[FigureName, tuple] = {
    FigureName.GUE_BULK: (EnsembleKind.GUE, 0.0, 10, "x", (-0.6, 0.6)),
    FigureName.LUE_BULK: (EnsembleKind.LUE, 0.5, 10, "x", (0.2, 0.8)),
    FigureName.GUE_EDGE: (EnsembleKind.GUE, 0.0, 10, "xi", (-2.0, 2.0)),
    FigureName.LUE_EDGE: (EnsembleKind.LUE, 0.5, 20, "xi", (-2.0, 2.0)),
}


class FigureBuilder:
    """
    Builds the exact-vs-asymptotic comparison datasets.

    Features:
    - Bulk figures: rho_N(x) against the order-1 bulk expansion
    - Edge figures: edge-scaled rho_N against the order-2 edge expansion
    - LUE edge figure also carries the Airy limit law
    """

    def __init__(self, points: int = FIGURE_POINTS):
        self.points = points

    def build(self, name: FigureName) -> FigureDataset:
        if name is FigureName.ALL:
            raise ValueError("build one figure at a time; use build_all for every figure")
        kind, alpha, n, abscissa, (low, high) = FIGURE_SETUPS[name]
        spec = EnsembleSpec(kind=kind, alpha=alpha, n=n)
        grid = np.linspace(low, high, self.points)

        limit = None
        if abscissa == "x":
            exact = exact_density.density_exact(spec, grid)
            asymptotic = [asymptotics.bulk_expansion(spec, x, 1).truncated_sum for x in grid]
        else:
            exact = exact_density.edge_scaled_exact(spec, grid)
            asymptotic = [asymptotics.edge_expansion(spec, xi, 2).truncated_sum for xi in grid]
            if name is FigureName.LUE_EDGE:
                limit = np.asarray(asymptotics.edge_limit_density(grid)).tolist()

        dataset = FigureDataset(
            name=name,
            spec=spec,
            abscissa=abscissa,
            grid=grid.tolist(),
            exact=np.asarray(exact).tolist(),
            asymptotic=list(asymptotic),
            limit=limit,
        )
        logger.info(f"Figure {name.value}: max abs error {dataset.max_abs_error:.3e}")
        if dataset.negative_count:
            logger.warning(f"Figure {name.value}: {dataset.negative_count} negative asymptotic values clamped for plotting")
        return dataset

    def build_all(self) -> List[FigureDataset]:
        return [self.build(name) for name in FIGURE_SETUPS]
