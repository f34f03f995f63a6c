import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from rmtdensity.analysis.analyzers import OracleChecker, ScalingAnalyzer
from rmtdensity.analysis.figures import FigureBuilder
from rmtdensity.cli.writers import Table, column_rows
from rmtdensity.exceptions import DomainError
from rmtdensity.models.schemas import CommandName, ContourSpec, DensityMethod, FigureName, RunConfig
from rmtdensity.services import asymptotics, ensembles, exact_density

logger = logging.getLogger(__name__)

EXIT_INPUT = 1
EXIT_NUMERICAL = 2


class CommandResult(BaseModel):
    """
    Datasets produced by one command.

    Each output pairs an optional file name (relative to --out when --out is
    a directory) with its table. `failure` names a tolerance breach that is
    reported after the outputs are written.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    outputs: List[Tuple[Optional[str], Table]]
    failure: Optional[str] = None


def _x_grid(config: RunConfig) -> np.ndarray:
    return np.linspace(config.xmin, config.xmax, config.points)


def _xi_grid(config: RunConfig) -> np.ndarray:
    return np.linspace(config.ximin, config.ximax, config.points)


def _curve_table(curve, abscissa: str) -> Table:
    return Table(
        columns=[abscissa, "value"],
        rows=column_rows(curve.grid, curve.values),
        metadata={
            "method": curve.method.value,
            "order": curve.order,
            "negative_count": curve.negative_count,
            "ensemble": curve.spec.label(),
        },
    )


def run_exact(config: RunConfig) -> CommandResult:
    spec = config.spec()
    grid = ensembles.clamp_to_hard_edge(spec, _x_grid(config), config.epsilon)
    curve = exact_density.density_curve(spec, grid, DensityMethod.EXACT_KERNEL)
    return CommandResult(outputs=[(None, _curve_table(curve, "x"))])


def run_bulk(config: RunConfig) -> CommandResult:
    spec = config.spec()
    curve = exact_density.density_curve(spec, _x_grid(config), DensityMethod.BULK_ASYMPTOTIC, config.order)
    return CommandResult(outputs=[(None, _curve_table(curve, "x"))])


def run_edge(config: RunConfig) -> CommandResult:
    spec = config.spec()
    curve = exact_density.density_curve(spec, _xi_grid(config), DensityMethod.EDGE_ASYMPTOTIC, config.order)
    return CommandResult(outputs=[(None, _curve_table(curve, "xi"))])


def run_match(config: RunConfig) -> CommandResult:
    """Bulk re-expansion, bulk expansion and edge expansion in N^(1/3) rho_N units."""
    spec = config.spec()
    grid = _xi_grid(config)
    units = 2.0 * ensembles.edge_density_scale(spec)
    x_points = ensembles.edge_to_x(spec, grid)
    reexpanded = [asymptotics.bulk_reexpanded_at_edge(spec, xi, spec.n) for xi in grid]
    bulk = [units * asymptotics.bulk_expansion(spec, x, 1).truncated_sum for x in x_points]
    edge = [2.0 * asymptotics.edge_expansion(spec, xi, 2).truncated_sum for xi in grid]
    table = Table(
        columns=["xi", "reexpanded", "bulk", "edge"],
        rows=column_rows(grid.tolist(), reexpanded, bulk, edge),
        metadata={"ensemble": spec.label(), "units": "2 * edge-scaled density"},
    )
    return CommandResult(outputs=[(None, table)])


def run_oracle_check(config: RunConfig) -> CommandResult:
    spec = config.spec()
    checker = OracleChecker(
        contour=ContourSpec(radius=config.radius, num_points=config.contour_points),
        tolerance=config.tolerance,
    )
    report = checker.compare(spec, _x_grid(config))
    table = Table(
        columns=["x", "kernel", "contour", "rel_gap"],
        rows=column_rows(report.grid, report.kernel, report.contour, report.rel_gap),
        metadata={
            "ensemble": spec.label(),
            "max_rel_gap": report.max_rel_gap,
            "tolerance": report.tolerance,
            "passed": report.passed,
        },
    )
    failure = None
    if not report.passed:
        failure = f"kernel vs contour gap {report.max_rel_gap:.3e} exceeds tolerance {report.tolerance:.1e}"
    return CommandResult(outputs=[(None, table)], failure=failure)


def run_moments(config: RunConfig) -> CommandResult:
    spec = config.spec()
    results = [exact_density.moment(spec, p) for p in range(config.pmax + 1)]
    table = Table(
        columns=["p", "value", "error_estimate"],
        rows=[[result.p, result.value, result.quadrature_error_estimate] for result in results],
        metadata={"ensemble": spec.label()},
    )
    return CommandResult(outputs=[(None, table)])


def run_figure(config: RunConfig) -> CommandResult:
    builder = FigureBuilder()
    logger.info(f"Building figure datasets: {config.which.value}")
    if config.which is FigureName.ALL:
        if config.out is None:
            raise DomainError("figure --which all writes one file per figure and needs --out DIRECTORY")
        datasets = builder.build_all()
    else:
        datasets = [builder.build(config.which)]

    outputs = []
    for dataset in datasets:
        table = Table(
            columns=dataset.columns(),
            rows=dataset.rows(),
            metadata={
                "figure": dataset.name.value,
                "ensemble": dataset.spec.label(),
                "max_abs_error": dataset.max_abs_error,
                "negative_count": dataset.negative_count,
            },
        )
        name = f"figure-{dataset.name.value}.{config.output_format.value}" if config.which is FigureName.ALL else None
        outputs.append((name, table))
    return CommandResult(outputs=outputs)


def run_scaling_report(config: RunConfig) -> CommandResult:
    rows = ScalingAnalyzer().report()
    columns = list(rows[0].model_dump().keys())
    table = Table(
        columns=columns,
        rows=[list(row.model_dump().values()) for row in rows],
        metadata={"passed": all(row.passed for row in rows)},
    )
    failed = [f"{row.criterion} ({row.ensemble})" for row in rows if not row.passed]
    failure = f"scaling criteria failed: {', '.join(failed)}" if failed else None
    return CommandResult(outputs=[(None, table)], failure=failure)


COMMANDS: Dict[CommandName, Callable[[RunConfig], CommandResult]] = {
    CommandName.EXACT: run_exact,
    CommandName.BULK: run_bulk,
    CommandName.EDGE: run_edge,
    CommandName.MATCH: run_match,
    CommandName.ORACLE_CHECK: run_oracle_check,
    CommandName.MOMENTS: run_moments,
    CommandName.FIGURE: run_figure,
    CommandName.SCALING_REPORT: run_scaling_report,
}


def output_path(config: RunConfig, name: Optional[str]) -> Optional[Path]:
    """Resolve where one output goes: stdout, the --out file, or a file inside the --out directory."""
    if config.out is None:
        return None
    if name is None:
        return config.out
    config.out.mkdir(parents=True, exist_ok=True)
    return config.out / name
