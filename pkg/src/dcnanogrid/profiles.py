"""Hourly load and PV profiles: CSV ingestion and zero-net-energy PV scaling."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO, Union

from dcnanogrid.errors import LengthMismatch, MalformedRow, NegativeValue, ZeroEnergy

HOURS_PER_YEAR = 8760

# canonical order, used for columns and report keys
CATEGORIES = ("hvac", "lighting", "interior_equipment", "water_heater")

Source = Union[str, TextIO]


@dataclass(frozen=True)
class TimeSeries:
    """Power samples in kW at a fixed timestep ``dt`` (hours)."""

    samples: tuple[float, ...]
    dt: float = 1.0

    def __post_init__(self):
        values = tuple(float(v) for v in self.samples)
        if not values:
            raise LengthMismatch("time series must contain at least one sample")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise MalformedRow(f"timestep must be positive and finite, got {self.dt!r}")
        for i, v in enumerate(values):
            if not math.isfinite(v):
                raise MalformedRow(f"sample {i} is not finite: {v!r}")
            if v < 0:
                raise NegativeValue(f"sample {i} is negative: {v!r}")
        object.__setattr__(self, "samples", values)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def is_annual(self) -> bool:
        return len(self.samples) == HOURS_PER_YEAR and self.dt == 1.0

    def energy(self) -> float:
        """Total energy in kWh."""
        return math.fsum(self.samples) * self.dt

    def peak(self) -> float:
        return max(self.samples)


@dataclass(frozen=True)
class LoadProfile:
    hvac: TimeSeries
    lighting: TimeSeries
    interior_equipment: TimeSeries
    water_heater: TimeSeries

    def __post_init__(self):
        shapes = {(len(s), s.dt) for s in self.series()}
        if len(shapes) != 1:
            raise LengthMismatch(f"load categories are not aligned: {sorted(shapes)}")

    def series(self) -> tuple[TimeSeries, ...]:
        return tuple(getattr(self, c) for c in CATEGORIES)

    def items(self):
        return ((c, getattr(self, c)) for c in CATEGORIES)

    def __len__(self) -> int:
        return len(self.hvac)

    @property
    def dt(self) -> float:
        return self.hvac.dt

    def total(self) -> TimeSeries:
        return TimeSeries(tuple(map(math.fsum, zip(*self.series()))), self.dt)


@dataclass(frozen=True)
class ScalingFactor:
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"scaling factor must be positive, got {self.k!r}")


def _open(source: Source) -> TextIO:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def _float_cell(cell: str, lineno: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise MalformedRow(f"line {lineno}: non-numeric cell {cell!r}") from None
    if not math.isfinite(value):
        raise MalformedRow(f"line {lineno}: non-finite cell {cell!r}")
    return value


def _read_rows(source: Source, ncols: int) -> tuple[list[str], list[list[float]]]:
    reader = csv.reader(_open(source))
    header = next(reader, None)
    if header is None:
        raise MalformedRow("empty CSV: a header row is required")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != ncols:
            raise MalformedRow(f"line {lineno}: expected {ncols} columns, got {len(row)}")
        index = _float_cell(row[0], lineno)
        if index != len(rows):
            raise MalformedRow(f"line {lineno}: hour_index {row[0]!r}, expected {len(rows)}")
        values = [_float_cell(cell, lineno) for cell in row[1:]]
        for v in values:
            if v < 0:
                raise NegativeValue(f"line {lineno}: negative power {v!r}")
        rows.append(values)
    return [h.strip() for h in header], rows


def _check_len(n: int, expected_len: int | None) -> None:
    if expected_len is not None and n != expected_len:
        raise LengthMismatch(f"expected {expected_len} rows, got {n}")


def parse_profile_csv(source: Source, expected_len: int | None = None, dt: float = 1.0) -> TimeSeries:
    """Parse a ``hour_index,value_kW`` CSV into a :class:`TimeSeries`.

    ``source`` is either the CSV text or an open text stream. Rows must be
    indexed 0..N-1 in order.
    """
    _, rows = _read_rows(source, 2)
    _check_len(len(rows), expected_len)
    return TimeSeries(tuple(r[0] for r in rows), dt)


def parse_load_profile_csv(source: Source, expected_len: int | None = None, dt: float = 1.0) -> LoadProfile:
    """Parse a five-column file: hour_index plus one column per load category.

    Category columns are matched by header name, so their order is free.
    """
    header, rows = _read_rows(source, 1 + len(CATEGORIES))
    missing = [c for c in CATEGORIES if c not in header[1:]]
    if missing:
        raise MalformedRow(f"load profile header lacks columns {missing}")
    _check_len(len(rows), expected_len)
    cols = {name: j for j, name in enumerate(header[1:])}
    return LoadProfile(**{c: TimeSeries(tuple(r[cols[c]] for r in rows), dt) for c in CATEGORIES})


def read_profile(path: str | Path, expected_len: int | None = None, dt: float = 1.0) -> TimeSeries:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_profile_csv(fh, expected_len, dt)


def read_load_profile(path: str | Path, expected_len: int | None = None, dt: float = 1.0) -> LoadProfile:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_load_profile_csv(fh, expected_len, dt)


def format_profile_csv(series: TimeSeries | Iterable[float], header: str = "hour_index,value_kW") -> str:
    lines = [header]
    lines.extend(f"{i},{float(v)!r}" for i, v in enumerate(series))
    return "\n".join(lines) + "\n"


def format_load_profile_csv(loads: LoadProfile) -> str:
    lines = ["hour_index," + ",".join(CATEGORIES)]
    for i, row in enumerate(zip(*loads.series())):
        lines.append(f"{i}," + ",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def pv_scaling_factor(pv: TimeSeries, load_total: TimeSeries) -> ScalingFactor:
    """Ratio of annual PV energy to annual load energy."""
    if len(pv) != len(load_total):
        raise LengthMismatch(f"pv has {len(pv)} samples, load has {len(load_total)}")
    pv_sum = math.fsum(pv.samples)
    load_sum = math.fsum(load_total.samples)
    if pv_sum == 0:
        raise ZeroEnergy("PV series carries no energy")
    if load_sum == 0:
        raise ZeroEnergy("load series carries no energy")
    return ScalingFactor(pv_sum / load_sum)


def apply_pv_scaling(pv: TimeSeries, k: ScalingFactor | float) -> TimeSeries:
    k = k if isinstance(k, ScalingFactor) else ScalingFactor(float(k))
    return TimeSeries(tuple(p / k.k for p in pv.samples), pv.dt)
