import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from rmtdensity import __version__
from rmtdensity.config import settings
from rmtdensity.models.schemas import OutputFormat

logger = logging.getLogger(__name__)


class Table(BaseModel):
    """Column names, rows and free-form metadata for one dataset."""

    columns: List[str]
    rows: List[List[Any]]
    metadata: Dict[str, Any] = Field(default_factory=dict)


def format_cell(value: Any) -> str:
    """Floats in 17-significant-digit scientific notation; everything else verbatim."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.16e}"
    return str(value)


def render_csv(table: Table, overrides: Optional[Dict[str, Any]] = None) -> str:
    """CSV with one leading `# settings:` comment per overridden numeric setting."""
    buffer = io.StringIO()
    for name, value in sorted((overrides or {}).items()):
        buffer.write(f"# settings: {name}={format_cell(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def _json_value(value: Any, depth: int) -> str:
    """json.dumps(indent=2, sort_keys=True) layout with floats written by format_cell."""
    if isinstance(value, float) and math.isfinite(value):
        return format_cell(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        pad = "  " * (depth + 1)
        items = [f"{pad}{json.dumps(str(key))}: {_json_value(value[key], depth + 1)}" for key in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * depth + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        pad = "  " * (depth + 1)
        items = [f"{pad}{_json_value(item, depth + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * depth + "]"
    return json.dumps(value)


def render_json(table: Table, config: Dict[str, Any]) -> str:
    payload = {
        "version": __version__,
        "config": config,
        "columns": table.columns,
        "rows": table.rows,
        "metadata": table.metadata,
    }
    return _json_value(payload, 0) + "\n"


def render(table: Table, output_format: OutputFormat, config: Dict[str, Any]) -> str:
    """Render one dataset; numeric settings without a CLI flag are echoed alongside."""
    if output_format is OutputFormat.JSON:
        return render_json(table, {**config, "settings": settings.numeric_settings()})
    return render_csv(table, settings.overridden_settings())


def write_dataset(text: str, out: Optional[Path]) -> None:
    """Write to `out`, or to stdout when no path is given."""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as e:
        logger.error(f"Error writing dataset to {out}: {e}")
        raise
    logger.info(f"Wrote {out}")


def column_rows(*columns: Sequence[Any]) -> List[List[Any]]:
    return [list(row) for row in zip(*columns)]
