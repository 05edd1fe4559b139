"""Branch-circuit wiring: conductor sizing, run resistance and I^2R losses.

Each load category is fed by one circuit with N items sharing the category
current equally. Its losses reduce to a single equivalent resistance
``sum(R_i) / N**2`` carrying the full category current.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from dcnanogrid.errors import CurrentExceedsTable, EmptyCategory, MalformedRow

COPPER_RESISTIVITY = 1.72e-8  # ohm*m at 20 C
DEFAULT_SAFETY_FACTOR = 1.5

WIRING_CATEGORIES = {
    "hvac": "HVAC",
    "lighting": "Lighting",
    "interior_equipment": "IE",
    "water_heater": "WH",
}


@dataclass(frozen=True)
class WireRun:
    run_length: float  # m, one way
    cross_section: float  # mm^2
    resistivity: float = COPPER_RESISTIVITY

    def __post_init__(self):
        if self.run_length < 0:
            raise ValueError(f"run length must be >= 0, got {self.run_length}")
        if self.cross_section <= 0:
            raise ValueError(f"cross section must be > 0, got {self.cross_section}")
        if self.resistivity <= 0:
            raise ValueError(f"resistivity must be > 0, got {self.resistivity}")


@dataclass(frozen=True)
class WiringCircuit:
    category: str
    r_eq: float  # milliohm
    source: str = "direct_table"

    def __post_init__(self):
        if self.category not in WIRING_CATEGORIES:
            raise ValueError(f"unknown load category {self.category!r}")
        if not (math.isfinite(self.r_eq) and self.r_eq >= 0):
            raise ValueError(f"equivalent resistance must be >= 0, got {self.r_eq}")
        if self.source not in ("direct_table", "computed"):
            raise ValueError(f"unknown resistance source {self.source!r}")


@dataclass(frozen=True)
class AmpacityTable:
    """(cross_section mm^2, max current A) pairs, strictly increasing in both."""

    entries: tuple[tuple[float, float], ...]

    def __post_init__(self):
        entries = tuple((float(a), float(i)) for a, i in self.entries)
        if not entries:
            raise ValueError("ampacity table is empty")
        for (a0, i0), (a1, i1) in zip(entries, entries[1:]):
            if not (a1 > a0 and i1 > i0):
                raise ValueError("ampacity table must be strictly increasing in both columns")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_csv(cls, path: str | Path) -> "AmpacityTable":
        with open(path, newline="", encoding="utf-8") as fh:
            return cls._parse(fh)

    @classmethod
    def default(cls) -> "AmpacityTable":
        ref = resources.files("dcnanogrid") / "data" / "ampacity_default.csv"
        with ref.open("r", encoding="utf-8", newline="") as fh:
            return cls._parse(fh)

    @classmethod
    def _parse(cls, fh) -> "AmpacityTable":
        reader = csv.reader(fh)
        next(reader, None)
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                entries.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise MalformedRow(f"ampacity table line {lineno}: {row!r}") from None
        return cls(tuple(entries))


def size_conductor(
    peak_current: float,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
    table: AmpacityTable | None = None,
) -> float:
    """Smallest cross section (mm^2) rated for ``peak_current * safety_factor``."""
    if peak_current < 0:
        raise ValueError(f"peak current must be >= 0, got {peak_current}")
    if safety_factor < 1:
        raise ValueError(f"safety factor must be >= 1, got {safety_factor}")
    table = table or AmpacityTable.default()
    required = peak_current * safety_factor
    for area, ampacity in table.entries:
        if ampacity >= required:
            return area
    raise CurrentExceedsTable(
        f"{required:.1f} A required, largest conductor carries {table.entries[-1][1]:.1f} A"
    )


def wire_resistance(run: WireRun) -> float:
    """Resistance in ohm of the supply and return conductors of one run."""
    return run.resistivity * 2.0 * run.run_length / (run.cross_section * 1e-6)


def equivalent_resistance(items: Sequence[float]) -> float:
    """Collapse per-item resistances into one circuit resistance: sum(R_i) / N^2."""
    n = len(items)
    if n == 0:
        raise EmptyCategory("a circuit needs at least one item")
    if any(r < 0 for r in items):
        raise ValueError("item resistances must be >= 0")
    return math.fsum(items) / (n * n)


def wiring_loss(circuit: WiringCircuit, category_power: float, bus_voltage: float) -> float:
    """I^2R loss in kW for a category drawing ``category_power`` kW at nominal bus voltage."""
    if category_power < 0:
        raise ValueError(f"category power must be >= 0, got {category_power}")
    if bus_voltage <= 0:
        raise ValueError(f"bus voltage must be > 0, got {bus_voltage}")
    current = category_power * 1000.0 / bus_voltage
    return circuit.r_eq * current * current / 1e6


def scale_resistance_by_area(r_eq: float, area_ratio: float) -> float:
    # run lengths grow with the linear dimension of the house
    if area_ratio <= 0:
        raise ValueError(f"area ratio must be > 0, got {area_ratio}")
    return r_eq * math.sqrt(area_ratio)


def circuit_from_runs(
    category: str,
    runs: Sequence[tuple[float, int]],
    peak_power: float,
    bus_voltage: float,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
    table: AmpacityTable | None = None,
    cross_section: float | None = None,
    resistivity: float = COPPER_RESISTIVITY,
) -> WiringCircuit:
    """Build a circuit from ``(run_length_m, item_count)`` groups.

    The conductor is sized once for the whole circuit from its peak current
    unless ``cross_section`` is given.
    """
    if cross_section is None:
        cross_section = size_conductor(peak_power * 1000.0 / bus_voltage, safety_factor, table)
    item_r = []
    for length, count in runs:
        item_r.extend([wire_resistance(WireRun(length, cross_section, resistivity))] * int(count))
    return WiringCircuit(category, equivalent_resistance(item_r) * 1000.0, "computed")
