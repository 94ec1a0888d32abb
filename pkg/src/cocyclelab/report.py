"""Bit-stable CSV / JSON report emission.

Floats are written with 17 significant digits and a fixed column order, so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["ReportTable", "emit_report", "format_value"]


@dataclass(frozen=True)
class ReportTable:
    columns: tuple[str, ...]
    rows: list[list] = field(repr=False)
    metadata: dict = field(default_factory=dict)


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_ready(value):
    if isinstance(value, float):
        return float(format(value, ".17g"))
    return value


def emit_report(table: ReportTable, fmt: str, path) -> None:
    """Write the table as CSV or JSON; trailing newline, deterministic bytes."""
    if fmt == "csv":
        lines = [",".join(table.columns)]
        for row in table.rows:
            lines.append(",".join(format_value(v) for v in row))
        payload = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = (
            json.dumps(
                {
                    "metadata": {k: _json_ready(v) for k, v in table.metadata.items()},
                    "columns": list(table.columns),
                    "rows": [[_json_ready(v) for v in row] for row in table.rows],
                },
                sort_keys=True,
                indent=2,
            )
            + "\n"
        )
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", newline="\n") as fh:
        fh.write(payload)
