"""Power converters described by load-fraction efficiency curves.

A converter stage is a bank of identical units sharing power equally, so the
curve is evaluated at throughput divided by the aggregate nominal power.
Efficiency is looked up at the power on the side that is known: the input
when forwarding a given input, the output when a demand must be met.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from dcnanogrid.errors import MalformedRow, OverNominal

ROLES = ("pv", "ac_dc", "battery")
BIN_LABELS = ("0-25", "25-50", "50-75", "75-100")
BIN_EDGES = (0.25, 0.5, 0.75)

# relative slack before a throughput counts as over the installed rating
NOMINAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EfficiencyCurve:
    fractions: tuple[float, ...]
    efficiencies: tuple[float, ...]

    def __post_init__(self):
        fr = tuple(float(x) for x in self.fractions)
        ef = tuple(float(x) for x in self.efficiencies)
        if len(fr) != len(ef):
            raise ValueError("fractions and efficiencies differ in length")
        if len(fr) < 2:
            raise ValueError("an efficiency curve needs at least two points")
        if any(not (0 < x <= 1) for x in fr):
            raise ValueError("load fractions must lie in (0, 1]")
        if any(b <= a for a, b in zip(fr, fr[1:])):
            raise ValueError("load fractions must be strictly increasing")
        if any(not (0 < e <= 1) for e in ef):
            raise ValueError("efficiencies must lie in (0, 1]")
        object.__setattr__(self, "fractions", fr)
        object.__setattr__(self, "efficiencies", ef)

    @classmethod
    def from_points(cls, points) -> "EfficiencyCurve":
        fr, ef = zip(*points)
        return cls(fr, ef)

    @classmethod
    def flat(cls, efficiency: float) -> "EfficiencyCurve":
        return cls((0.5, 1.0), (efficiency, efficiency))

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fractions, self.efficiencies))

    @classmethod
    def from_csv(cls, path: str | Path) -> "EfficiencyCurve":
        points = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader, None)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    points.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    raise MalformedRow(f"{path}:{lineno}: bad curve row {row!r}") from None
        try:
            return cls.from_points(points)
        except ValueError as exc:
            raise MalformedRow(f"{path}: {exc}") from None


def efficiency_at(curve: EfficiencyCurve, load_fraction: float) -> float:
    """Piecewise-linear efficiency, held flat outside the tabulated range."""
    if load_fraction < 0:
        raise ValueError(f"load fraction must be >= 0, got {load_fraction}")
    fr, ef = curve.fractions, curve.efficiencies
    if load_fraction <= fr[0]:
        return ef[0]
    if load_fraction >= fr[-1]:
        return ef[-1]
    j = bisect.bisect_right(fr, load_fraction)
    x0, x1 = fr[j - 1], fr[j]
    y0, y1 = ef[j - 1], ef[j]
    return y0 + (y1 - y0) * (load_fraction - x0) / (x1 - x0)


def parallel_count(peak_power: float, unit_nominal: float) -> int:
    """Number of units needed to carry ``peak_power``, at least one."""
    if unit_nominal <= 0:
        raise ValueError(f"unit nominal power must be > 0, got {unit_nominal}")
    if peak_power < 0:
        raise ValueError(f"peak power must be >= 0, got {peak_power}")
    return max(1, math.ceil(peak_power / unit_nominal))


@dataclass(frozen=True)
class ConverterSpec:
    role: str
    unit_nominal: float  # kW
    parallel_count: int
    curve: EfficiencyCurve

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown converter role {self.role!r}")
        if not (self.unit_nominal > 0 and math.isfinite(self.unit_nominal)):
            raise ValueError(f"unit nominal power must be > 0, got {self.unit_nominal}")
        if int(self.parallel_count) != self.parallel_count or self.parallel_count < 1:
            raise ValueError(f"parallel count must be a positive integer, got {self.parallel_count}")

    @property
    def total_nominal(self) -> float:
        return self.unit_nominal * self.parallel_count

    @classmethod
    def sized_for(cls, role: str, peak_power: float, unit_nominal: float, curve: EfficiencyCurve) -> "ConverterSpec":
        return cls(role, unit_nominal, parallel_count(peak_power, unit_nominal), curve)


def _fraction(spec: ConverterSpec, power: float, what: str) -> float:
    if power < 0:
        raise ValueError(f"{what} power must be >= 0, got {power}")
    nominal = spec.total_nominal
    if power > nominal * (1 + NOMINAL_TOLERANCE):
        raise OverNominal(f"{spec.role} converter: {what} {power:.6g} kW exceeds rating {nominal:.6g} kW")
    return power / nominal


def convert_known_input(spec: ConverterSpec, input_power: float) -> tuple[float, float]:
    """Return ``(output, loss)`` in kW for a given input power."""
    frac = _fraction(spec, input_power, "input")
    if input_power == 0:
        return 0.0, 0.0
    output = input_power * efficiency_at(spec.curve, frac)
    return output, input_power - output


def convert_known_output(spec: ConverterSpec, output_power: float) -> tuple[float, float]:
    """Return ``(input, loss)`` in kW needed to deliver ``output_power``."""
    frac = _fraction(spec, output_power, "output")
    if output_power == 0:
        return 0.0, 0.0
    input_power = output_power / efficiency_at(spec.curve, frac)
    return input_power, input_power - output_power


@dataclass
class OperatingHistogram:
    """Hours spent in each quarter of nominal power; idle steps kept apart."""

    counts: list[int] = field(default_factory=lambda: [0, 0, 0, 0])
    idle_count: int = 0
    over_nominal_count: int = 0

    @property
    def active_count(self) -> int:
        return sum(self.counts)

    @property
    def total_count(self) -> int:
        return self.active_count + self.idle_count

    def shares(self) -> list[float]:
        """Percent of non-idle steps per bin (all zero if never active)."""
        n = self.active_count
        if n == 0:
            return [0.0] * 4
        return [100.0 * c / n for c in self.counts]

    def idle_share(self) -> float:
        n = self.total_count
        return 100.0 * self.idle_count / n if n else 0.0

    def to_dict(self) -> dict:
        return {
            "bins": list(BIN_LABELS),
            "counts": list(self.counts),
            "idle_count": self.idle_count,
            "over_nominal_count": self.over_nominal_count,
            "share_pct": self.shares(),
            "idle_pct": self.idle_share(),
        }


def bin_index(load_fraction: float) -> int:
    # upper edges are inclusive: 0.25 belongs to the first bin
    for i, edge in enumerate(BIN_EDGES):
        if load_fraction <= edge:
            return i
    return 3


def record_operating_point(hist: OperatingHistogram, power: float, total_nominal: float) -> OperatingHistogram:
    if power < 0:
        raise ValueError(f"power must be >= 0, got {power}")
    if power == 0:
        hist.idle_count += 1
        return hist
    frac = power / total_nominal
    if frac > 1 + NOMINAL_TOLERANCE:
        hist.over_nominal_count += 1
    hist.counts[bin_index(frac)] += 1
    return hist
