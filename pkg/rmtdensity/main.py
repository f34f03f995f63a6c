import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from rmtdensity import __version__
from rmtdensity.cli.commands import COMMANDS, EXIT_INPUT, EXIT_NUMERICAL, output_path
from rmtdensity.cli.writers import render, write_dataset
from rmtdensity.config import settings
from rmtdensity.exceptions import ContourConfigError, DomainError, QuadratureError, ToleranceError
from rmtdensity.models.schemas import CommandName, EnsembleKind, FigureName, OutputFormat, RunConfig

"""
rmtdensity - Command Line Entry Point

Evaluates exact and asymptotic GUE/LUE eigenvalue densities and writes them
as deterministic CSV or JSON datasets.

Features:
- exact, bulk and edge density datasets
- bulk/edge matching table
- kernel vs contour oracle check
- moments, figure datasets and the error-scaling report

Exit codes: 0 success, 1 invalid input or unwritable output, 2 numerical
tolerance failure.
"""

logging.basicConfig(level=settings.log_level)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ensemble", choices=[kind.value for kind in EnsembleKind])
    common.add_argument("--alpha", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--xmin", type=float)
    common.add_argument("--xmax", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--ximin", type=float)
    common.add_argument("--ximax", type=float)
    common.add_argument("--order", type=int)
    common.add_argument("--format", dest="output_format", choices=[fmt.value for fmt in OutputFormat])
    common.add_argument("--out")
    common.add_argument("--which", choices=[name.value for name in FigureName])
    common.add_argument("--pmax", type=int)
    common.add_argument("--epsilon", type=float, default=settings.hard_edge_epsilon)
    common.add_argument("--radius", type=float, default=settings.contour_radius)
    common.add_argument("--contour-points", dest="contour_points", type=int, default=settings.contour_points)
    common.add_argument("--tolerance", type=float, default=settings.oracle_tolerance)

    parser = argparse.ArgumentParser(prog="rmtdensity", description="GUE/LUE eigenvalue densities and their asymptotics")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in CommandName:
        subparsers.add_parser(command.value, parents=[common])
    return parser


def parse_config(argv: Optional[List[str]]) -> RunConfig:
    args = build_parser().parse_args(argv)
    flags = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**flags)


def _first_error(e: ValidationError) -> str:
    error = e.errors()[0]
    location = ".".join(str(part) for part in error.get("loc", ()))
    message = error.get("msg", str(e))
    return f"{location}: {message}" if location else message


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except ValidationError as e:
        print(f"error: {_first_error(e)}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as e:
        # argparse exits 0 for --help/--version and 2 for usage errors
        return 0 if e.code == 0 else EXIT_INPUT

    logger.info(f"Running {config.command.value} for {config.spec().label()}")
    try:
        result = COMMANDS[config.command](config)
        for name, table in result.outputs:
            text = render(table, config.output_format, config.echo())
            write_dataset(text, output_path(config, name))
        if result.failure is not None:
            raise ToleranceError(result.failure)
    except (DomainError, ContourConfigError, ValidationError, ValueError) as e:
        print(f"error: {e}".splitlines()[0], file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: cannot write output: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (QuadratureError, ToleranceError) as e:
        logger.error(f"{config.command.value} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    logger.info(f"{config.command.value} finished")
    return 0


if __name__ == "__main__":
    sys.exit(main())
