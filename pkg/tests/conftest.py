from __future__ import annotations

from pathlib import Path

import pytest

from dcnanogrid.battery import BatterySpec
from dcnanogrid.config import load_config, packaged_data_dir
from dcnanogrid.converters import ConverterSpec, EfficiencyCurve
from dcnanogrid.engine import Scenario
from dcnanogrid.profiles import CATEGORIES, LoadProfile, TimeSeries
from dcnanogrid.wiring import WiringCircuit

DATA = packaged_data_dir()
SCENARIOS = DATA / "scenarios"
GOLDEN = Path(__file__).parent / "golden"


def curve(name: str) -> EfficiencyCurve:
    return EfficiencyCurve.from_csv(DATA / "curves" / f"{name}.csv")


def make_scenario(
    loads,
    pv,
    *,
    voltage: float = 48.0,
    r_eq=0.0,
    pv_curve: EfficiencyCurve | None = None,
    ac_curve: EfficiencyCurve | None = None,
    pv_nominal: float = 100.0,
    ac_nominal: float = 100.0,
    battery: BatterySpec | None = None,
    battery_curve: EfficiencyCurve | None = None,
    battery_unit: float | None = None,
    initial_soc: float | None = None,
    dt: float = 1.0,
) -> Scenario:
    """Small hand-built scenario.

    ``loads`` is either one list (all on hvac) or a dict of category lists.
    """
    if not isinstance(loads, dict):
        loads = {"hvac": loads}
    n = len(pv)
    series = {c: TimeSeries(tuple(loads.get(c, [0.0] * n)), dt) for c in CATEGORIES}
    if not isinstance(r_eq, dict):
        r_eq = {c: r_eq for c in CATEGORIES}
    return Scenario(
        bus_voltage=voltage,
        loads=LoadProfile(**series),
        pv=TimeSeries(tuple(pv), dt),
        wiring={c: WiringCircuit(c, r_eq.get(c, 0.0)) for c in CATEGORIES},
        pv_converter=ConverterSpec("pv", pv_nominal, 1, pv_curve or EfficiencyCurve.flat(1.0)),
        ac_dc_converter=ConverterSpec("ac_dc", ac_nominal, 1, ac_curve or EfficiencyCurve.flat(1.0)),
        battery=battery or BatterySpec(),
        battery_curve=battery_curve or (EfficiencyCurve.flat(1.0) if battery and battery.present else None),
        battery_unit_nominal=battery_unit,
        initial_soc=initial_soc,
    )


_config_cache: dict[str, object] = {}


def fixture_config(name: str, mode: str | None = None):
    """Load (and memoise) a shipped scenario config by file stem."""
    key = f"{name}:{mode}"
    if key not in _config_cache:
        _config_cache[key] = load_config(SCENARIOS / f"{name}.toml", mode)
    return _config_cache[key]


@pytest.fixture
def toy_config():
    return fixture_config("toy_day")


# one line per acceptance criterion, echoed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
