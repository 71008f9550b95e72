"""Strict delimited-file ingestion and emission for the three dataset kinds.

Formats (all comma separated, LF line endings, no quoting needed):

  population   optional "# vintage: postcensal|intercensal|synthetic" line,
               header "month,age,count", rows "YYYY-MM,<int>,<positive "
               "number>". Rows may arrive in any order but must tile a full
               month-by-age rectangle with no gaps or duplicates.
  index        "# convention: close|average" line, header "month,level",
               rows "YYYY-MM,<positive number>" in strictly consecutive
               month order.
  gdp          "# unit: annualized-growth|level" line, header
               "quarter,value", rows "YYYY-Qn,<number>" in strictly
               consecutive quarter order.

Writers emit values with Python's shortest round-trip float representation,
so a load, emit, load cycle reproduces the exact same numbers. Errors name
the file and the 1-based line they come from.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import SchemaError, SeriesError
from .population import VINTAGES, AgePyramid
from .series import (
    UNIT_GROWTH,
    UNIT_INDEX,
    UNIT_LEVEL,
    MonthKey,
    MonthlySeries,
    QuarterKey,
    QuarterlySeries,
)

INDEX_CONVENTIONS = ("close", "average")
GDP_UNITS = {"annualized-growth": UNIT_GROWTH, "level": UNIT_LEVEL}
_GDP_UNIT_NAMES = {v: k for k, v in GDP_UNITS.items()}


@dataclass(frozen=True)
class IndexData:
    """An index level series plus the sampling convention it was built with."""

    series: MonthlySeries
    convention: str


@dataclass(frozen=True)
class ManifestEntry:
    """Provenance line for one source file: coverage, tag and checksum."""

    kind: str
    path: str
    rows: int
    coverage_start: str
    coverage_end: str
    tag: str
    sha256: str

    def line(self) -> str:
        return (
            f"input {self.kind} {self.path} rows={self.rows} "
            f"coverage={self.coverage_start}..{self.coverage_end} tag={self.tag} sha256={self.sha256}"
        )


def sha256_of(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _read_lines(path: Union[str, Path]) -> list[str]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{p}: cannot read file: {exc}") from exc
    return text.splitlines()


def _fail(path, lineno: int, message: str) -> None:
    raise SchemaError(f"{path}:{lineno}: {message}")


def _parse_float(path, lineno: int, text: str, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        _fail(path, lineno, f"cannot parse {what} {text!r} as a number")
    if not np.isfinite(v):
        _fail(path, lineno, f"{what} must be finite, got {text!r}")
    return v


def _parse_month(path, lineno: int, text: str) -> MonthKey:
    try:
        return MonthKey.parse(text)
    except SeriesError as exc:
        _fail(path, lineno, str(exc))


def load_population(path: Union[str, Path]) -> AgePyramid:
    """Load a month-by-age count rectangle; reject gaps, duplicates and bad counts."""
    lines = _read_lines(path)
    lineno = 0
    vintage = "postcensal"
    if lineno < len(lines) and lines[lineno].startswith("#"):
        head = lines[lineno].strip()
        if not head.startswith("# vintage:"):
            _fail(path, lineno + 1, f"unexpected comment {head!r}, only '# vintage: ...' is allowed")
        vintage = head.split(":", 1)[1].strip()
        if vintage not in VINTAGES:
            _fail(path, lineno + 1, f"unknown vintage {vintage!r}, expected one of {sorted(VINTAGES)}")
        lineno += 1
    if lineno >= len(lines) or lines[lineno].strip() != "month,age,count":
        got = lines[lineno].strip() if lineno < len(lines) else "<end of file>"
        _fail(path, lineno + 1, f"expected header 'month,age,count', got {got!r}")
    lineno += 1

    cells: dict[tuple[MonthKey, int], float] = {}
    for i in range(lineno, len(lines)):
        line = lines[i].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            _fail(path, i + 1, f"expected 3 columns month,age,count, got {len(parts)}")
        month = _parse_month(path, i + 1, parts[0])
        try:
            age = int(parts[1])
        except ValueError:
            _fail(path, i + 1, f"cannot parse age {parts[1]!r} as an integer")
        count = _parse_float(path, i + 1, parts[2], "count")
        if count <= 0:
            _fail(path, i + 1, f"count must be positive, got {parts[2]}")
        key = (month, age)
        if key in cells:
            _fail(path, i + 1, f"duplicate row for month {month} age {age}")
        cells[key] = count
    if not cells:
        raise SchemaError(f"{path}: no data rows")

    months = sorted({m for m, _ in cells})
    ages = sorted({a for _, a in cells})
    start, last = months[0], months[-1]
    n_months = last.diff(start) + 1
    n_ages = ages[-1] - ages[0] + 1
    counts = np.empty((n_months, n_ages))
    for k in range(n_months):
        month = start.plus(k)
        for j in range(n_ages):
            age = ages[0] + j
            if (month, age) not in cells:
                raise SchemaError(f"{path}: missing row for month {month} age {age}")
            counts[k, j] = cells[(month, age)]
    if len(cells) != n_months * n_ages:
        raise SchemaError(f"{path}: {len(cells)} rows do not tile {n_months} months x {n_ages} ages")
    return AgePyramid(start, range(ages[0], ages[-1] + 1), counts, vintage)


def write_population(p: AgePyramid, path: Union[str, Path]) -> None:
    lines = [f"# vintage: {p.vintage}", "month,age,count"]
    for k in range(p.n_months):
        month = p.start.plus(k)
        for j, age in enumerate(p.ages):
            lines.append(f"{month},{age},{float(p.counts[k, j])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_index(path: Union[str, Path]) -> IndexData:
    """Load an index level series; months must be consecutive and levels positive."""
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("# convention:"):
        got = lines[0].strip() if lines else "<end of file>"
        _fail(path, 1, f"expected '# convention: close|average' header line, got {got!r}")
    convention = lines[0].split(":", 1)[1].strip()
    if convention not in INDEX_CONVENTIONS:
        _fail(path, 1, f"unknown convention {convention!r}, expected close or average")
    if len(lines) < 2 or lines[1].strip() != "month,level":
        got = lines[1].strip() if len(lines) > 1 else "<end of file>"
        _fail(path, 2, f"expected header 'month,level', got {got!r}")

    months: list[MonthKey] = []
    levels: list[float] = []
    for i in range(2, len(lines)):
        line = lines[i].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            _fail(path, i + 1, f"expected 2 columns month,level, got {len(parts)}")
        month = _parse_month(path, i + 1, parts[0])
        level = _parse_float(path, i + 1, parts[1], "level")
        if level <= 0:
            _fail(path, i + 1, f"level must be positive, got {parts[1]}")
        if months:
            step = month.diff(months[-1])
            if step != 1:
                what = "out of order" if step < 1 else f"gap of {step - 1} months"
                _fail(path, i + 1, f"months must be consecutive: {months[-1]} then {month} ({what})")
        months.append(month)
        levels.append(level)
    if not months:
        raise SchemaError(f"{path}: no data rows")
    return IndexData(MonthlySeries(months[0], levels, UNIT_INDEX), convention)


def write_index(series: MonthlySeries, convention: str, path: Union[str, Path]) -> None:
    if series.unit != UNIT_INDEX:
        raise SeriesError(f"index writer expects an index-points series, got {series.unit}")
    if convention not in INDEX_CONVENTIONS:
        raise SeriesError(f"unknown convention {convention!r}, expected close or average")
    lines = [f"# convention: {convention}", "month,level"]
    for k, v in enumerate(series.values):
        lines.append(f"{series.start.plus(k)},{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_gdp(path: Union[str, Path]) -> QuarterlySeries:
    """Load a quarterly GDP series; quarters must be consecutive."""
    lines = _read_lines(path)
    if not lines or not lines[0].startswith("# unit:"):
        got = lines[0].strip() if lines else "<end of file>"
        _fail(path, 1, f"expected '# unit: annualized-growth|level' header line, got {got!r}")
    unit_name = lines[0].split(":", 1)[1].strip()
    if unit_name not in GDP_UNITS:
        _fail(path, 1, f"unknown unit {unit_name!r}, expected annualized-growth or level")
    if len(lines) < 2 or lines[1].strip() != "quarter,value":
        got = lines[1].strip() if len(lines) > 1 else "<end of file>"
        _fail(path, 2, f"expected header 'quarter,value', got {got!r}")

    quarters: list[QuarterKey] = []
    values: list[float] = []
    for i in range(2, len(lines)):
        line = lines[i].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            _fail(path, i + 1, f"expected 2 columns quarter,value, got {len(parts)}")
        try:
            quarter = QuarterKey.parse(parts[0])
        except SeriesError as exc:
            _fail(path, i + 1, str(exc))
        value = _parse_float(path, i + 1, parts[1], "value")
        if quarters:
            step = quarter.diff(quarters[-1])
            if step != 1:
                what = "out of order" if step < 1 else f"missing {step - 1} quarter(s)"
                _fail(path, i + 1, f"quarters must be consecutive: {quarters[-1]} then {quarter} ({what})")
        quarters.append(quarter)
        values.append(value)
    if not quarters:
        raise SchemaError(f"{path}: no data rows")
    return QuarterlySeries(quarters[0], values, GDP_UNITS[unit_name])


def write_gdp(series: QuarterlySeries, path: Union[str, Path]) -> None:
    lines = [f"# unit: {_GDP_UNIT_NAMES[series.unit]}", "quarter,value"]
    for k, v in enumerate(series.values):
        lines.append(f"{series.start.plus(k)},{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def describe_population(path: Union[str, Path], p: AgePyramid) -> ManifestEntry:
    return ManifestEntry(
        "population", str(path), p.n_months * len(p.ages), str(p.start), str(p.end), p.vintage, sha256_of(path)
    )


def describe_index(path: Union[str, Path], d: IndexData) -> ManifestEntry:
    return ManifestEntry(
        "index", str(path), len(d.series), str(d.series.start), str(d.series.end), d.convention, sha256_of(path)
    )


def describe_gdp(path: Union[str, Path], q: QuarterlySeries) -> ManifestEntry:
    return ManifestEntry(
        "gdp", str(path), len(q), str(q.start), str(q.end), _GDP_UNIT_NAMES[q.unit], sha256_of(path)
    )
