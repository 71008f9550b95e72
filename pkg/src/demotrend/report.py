"""Report emission: delimited tables, series files, line charts, manifest.

Layout under the output directory:

    tables/<name>.csv    one delimited table per test or summary
    series/<name>.csv    month,value pairs for each exported series
    plots/<name>.svg     simple line charts, one per declared plot
    manifest.txt         inputs (with checksums) and every emitted file

Emission is deterministic: floats are rendered with 12 significant digits,
nothing embeds a timestamp, and the SVG backend runs with a fixed hash salt,
so identical inputs produce byte-identical trees.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import matplotlib
from matplotlib.figure import Figure

from .errors import SeriesError
from .ingest import ManifestEntry
from .series import MonthKey, MonthlySeries

_SVG_SALT = "demotrend"


@dataclass(frozen=True)
class Table:
    """A named delimited table; rows may mix strings and numbers."""

    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass(frozen=True)
class SeriesExport:
    name: str
    series: MonthlySeries


@dataclass(frozen=True)
class PlotSpec:
    """One line chart: labeled monthly curves drawn on a shared axis."""

    name: str
    curves: tuple[tuple[str, MonthlySeries], ...]
    ylabel: str = ""


def format_value(v) -> str:
    """Render one cell: floats get 12 significant digits, the rest str()."""
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _check_name(name: str) -> str:
    if not name or any(c in name for c in "/\\,\n"):
        raise SeriesError(f"bad artifact name {name!r}")
    return name


def _month_axis(series: MonthlySeries) -> list[float]:
    # Year fractions place each month at its middle for plotting.
    return [m.year + (m.month - 0.5) / 12.0 for m in series.months()]


def _render_plot(spec: PlotSpec, path: Path) -> None:
    fig = Figure(figsize=(8.0, 4.5))
    ax = fig.add_subplot(111)
    for label, series in spec.curves:
        ax.plot(_month_axis(series), series.values, label=label, linewidth=1.2)
    ax.set_xlabel("year")
    if spec.ylabel:
        ax.set_ylabel(spec.ylabel)
    ax.grid(True, alpha=0.3)
    if len(spec.curves) > 1:
        ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def emit_report(
    tables: Sequence[Table],
    series: Sequence[SeriesExport],
    out_dir: Union[str, Path],
    *,
    plots: Sequence[PlotSpec] = (),
    inputs: Sequence[ManifestEntry] = (),
) -> list[Path]:
    """Write all artifacts under out_dir and return the written paths.

    The manifest is always written, even for an otherwise empty report; it
    lists the provenance of every input and the checksum of every emitted
    file, using paths relative to out_dir so reruns into different
    directories stay comparable.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[tuple[str, Path]] = []

    for table in tables:
        name = _check_name(table.name)
        path = out / "tables" / f"{name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [",".join(table.columns)]
        for row in table.rows:
            if len(row) != len(table.columns):
                raise SeriesError(f"table {name!r} row has {len(row)} cells, expected {len(table.columns)}")
            lines.append(",".join(format_value(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append((f"tables/{name}.csv", path))

    for export in series:
        name = _check_name(export.name)
        path = out / "series" / f"{name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["month,value"]
        s = export.series
        for k, v in enumerate(s.values):
            lines.append(f"{s.start.plus(k)},{format(float(v), '.12g')}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append((f"series/{name}.csv", path))

    for spec in plots:
        name = _check_name(spec.name)
        path = out / "plots" / f"{name}.svg"
        path.parent.mkdir(parents=True, exist_ok=True)
        _render_plot(spec, path)
        written.append((f"plots/{name}.svg", path))

    manifest = out / "manifest.txt"
    lines = ["# demotrend manifest"]
    for entry in inputs:
        lines.append(entry.line())
    for rel, path in sorted(written):
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        lines.append(f"output {rel} bytes={path.stat().st_size} sha256={digest}")
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [p for _, p in written] + [manifest]
