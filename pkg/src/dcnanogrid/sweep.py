"""Parameter studies: battery capacity sweeps and the load/voltage/battery matrix."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

from dcnanogrid.engine import AnnualReport, Scenario, simulate_year
from dcnanogrid.errors import NanogridError, TooFewPoints

DEFAULT_SLOPE_THRESHOLD = 1.0  # BDT hours per kWh of capacity
DEFAULT_MODULE_KWH = 2.4


@dataclass(frozen=True)
class SweepPoint:
    capacity: float
    efficiency_pct: float
    bdt_hours: float


@dataclass(frozen=True)
class MatrixCell:
    load_model: str
    bus_voltage: float
    battery_enabled: bool
    report: AnnualReport

    @property
    def efficiency_pct(self) -> float:
        return self.report.efficiency_pct


class Knee(NamedTuple):
    capacity: float
    no_knee: bool = False


def capacity_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic range, e.g. 2.4, 4.8, ... 48.0."""
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(n)]


def _map(fn: Callable, items: Sequence, workers: int | None) -> list:
    if workers and workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _sweep_point(scenario: Scenario) -> SweepPoint:
    report = simulate_year(scenario)
    return SweepPoint(scenario.battery.capacity, report.efficiency_pct, report.bdt_hours)


def battery_capacity_sweep(
    base_scenario: Scenario, capacities: Sequence[float], workers: int | None = None
) -> list[SweepPoint]:
    """Simulate ``base_scenario`` once per battery capacity, in the given order.

    The battery converter is re-rated for every capacity.
    """
    if not capacities:
        raise ValueError("capacity list is empty")
    if any(c < 0 for c in capacities):
        raise ValueError("capacities must be >= 0")
    scenarios = [base_scenario.with_battery_capacity(float(c)) for c in capacities]
    return _map(_sweep_point, scenarios, workers)


def select_capacity_knee(points: Sequence[SweepPoint], slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> Knee:
    """Smallest capacity beyond which BDT falls slower than ``slope_threshold``.

    Every interval from the returned capacity onward must have
    ``|dBDT/dcapacity| < slope_threshold``. Without such a capacity the
    largest one is returned and ``no_knee`` is set.
    """
    if len(points) < 2:
        raise TooFewPoints(f"need at least two sweep points, got {len(points)}")
    caps = [p.capacity for p in points]
    if any(b <= a for a, b in zip(caps, caps[1:])):
        raise ValueError("sweep points must be sorted by strictly increasing capacity")
    steep = [
        abs((b.bdt_hours - a.bdt_hours) / (b.capacity - a.capacity)) >= slope_threshold
        for a, b in zip(points, points[1:])
    ]
    if steep[-1]:
        return Knee(caps[-1], True)
    i = len(steep)
    while i > 0 and not steep[i - 1]:
        i -= 1
    return Knee(caps[i])


def snap_to_module(capacity: float, module_kwh: float = DEFAULT_MODULE_KWH) -> float:
    """Round down to a whole number of battery modules (at least one)."""
    n = math.floor(capacity / module_kwh + 1e-9)
    return round(max(n, 1) * module_kwh, 10)


class MatrixCellError(NanogridError):
    def __init__(self, load_model, bus_voltage, battery_enabled, cause: Exception):
        super().__init__(f"cell ({load_model}, {bus_voltage:g} V, battery={battery_enabled}): {cause}")
        self.cell = (load_model, bus_voltage, battery_enabled)
        self.cause = cause


def _run_cell(args) -> AnnualReport:
    key, scenario = args
    try:
        return simulate_year(scenario)
    except NanogridError as exc:
        raise MatrixCellError(*key, exc) from exc


def scenario_matrix(
    scenarios: Mapping[tuple[str, float], Scenario],
    load_models: Sequence[str],
    voltages: Sequence[float],
    battery_options: Sequence[bool] = (False, True),
    workers: int | None = None,
) -> list[MatrixCell]:
    """Run the Cartesian product of load model x bus voltage x battery on/off.

    ``scenarios`` maps ``(load_model, voltage)`` to a scenario carrying its
    battery configuration; the "off" cells drop the battery.
    """
    if not (load_models and voltages and battery_options):
        raise ValueError("matrix axes must be nonempty")
    keys = list(itertools.product(load_models, voltages, battery_options))
    jobs = []
    for load, volt, batt in keys:
        try:
            base = scenarios[(load, volt)]
        except KeyError:
            raise KeyError(f"no scenario for load model {load!r} at {volt:g} V") from None
        jobs.append(((load, volt, batt), base if batt else base.without_battery()))
    reports = _map(_run_cell, jobs, workers)
    return [MatrixCell(load, volt, batt, rep) for (load, volt, batt), rep in zip(keys, reports)]
