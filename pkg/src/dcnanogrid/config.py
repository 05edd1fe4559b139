"""TOML run configuration: one file fully determines a scenario, sweep or matrix.

Relative paths are looked up next to the config file first, then in the
directory named by ``$DCNANOGRID_FIXTURES``, then in the packaged data
directory. The README documents the full schema.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from dcnanogrid.battery import BatterySpec
from dcnanogrid.converters import ConverterSpec, EfficiencyCurve, parallel_count
from dcnanogrid.engine import Scenario
from dcnanogrid.errors import ConfigFileNotFound, InvalidValue, MissingField, NanogridError
from dcnanogrid.profiles import (
    CATEGORIES,
    LoadProfile,
    apply_pv_scaling,
    pv_scaling_factor,
    read_load_profile,
    read_profile,
)
from dcnanogrid.sweep import DEFAULT_MODULE_KWH, DEFAULT_SLOPE_THRESHOLD, capacity_range
from dcnanogrid.wiring import (
    COPPER_RESISTIVITY,
    DEFAULT_SAFETY_FACTOR,
    AmpacityTable,
    WiringCircuit,
    circuit_from_runs,
    scale_resistance_by_area,
    wiring_loss,
)

FIXTURES_ENV = "DCNANOGRID_FIXTURES"
MODES = ("single", "sweep", "matrix")


def packaged_data_dir() -> Path:
    return Path(str(resources.files("dcnanogrid") / "data"))


@dataclass
class SweepParams:
    capacities: list[float]
    slope_threshold: float = DEFAULT_SLOPE_THRESHOLD
    module_kwh: float = DEFAULT_MODULE_KWH


@dataclass
class MatrixParams:
    load_models: list[str]
    voltages: list[float]
    battery_options: list[bool]
    scenarios: dict[tuple[str, float], Scenario]


@dataclass
class RunConfig:
    mode: str
    path: Path
    scenario: Scenario | None = None
    sweep: SweepParams | None = None
    matrix: MatrixParams | None = None
    out_dir: Path | None = None
    trace: bool = False
    raw: dict = field(default_factory=dict, repr=False)


class _Section:
    """Typed accessors over one TOML table that report the full key path."""

    def __init__(self, data: dict, prefix: str = ""):
        self.data = data
        self.prefix = prefix

    def path(self, key: str) -> str:
        return f"{self.prefix}.{key}" if self.prefix else key

    def __contains__(self, key):
        return key in self.data

    def section(self, key: str, required: bool = False) -> "_Section":
        value = self.data.get(key)
        if value is None:
            if required:
                raise MissingField(self.path(key))
            value = {}
        if not isinstance(value, dict):
            raise InvalidValue(self.path(key), "expected a table")
        return _Section(value, self.path(key))

    def get(self, key: str, default: Any = None, required: bool = False) -> Any:
        if key not in self.data:
            if required:
                raise MissingField(self.path(key))
            return default
        return self.data[key]

    def number(self, key, default=None, required=False, positive=False, nonneg=False) -> float | None:
        value = self.get(key, default, required)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidValue(self.path(key), f"expected a number, got {value!r}")
        if positive and value <= 0:
            raise InvalidValue(self.path(key), "must be > 0")
        if nonneg and value < 0:
            raise InvalidValue(self.path(key), "must be >= 0")
        return float(value)

    def string(self, key, default=None, required=False) -> str | None:
        value = self.get(key, default, required)
        if value is not None and not isinstance(value, str):
            raise InvalidValue(self.path(key), f"expected a string, got {value!r}")
        return value


class _Resolver:
    def __init__(self, base: Path):
        self.roots = [base]
        env = os.environ.get(FIXTURES_ENV)
        if env:
            self.roots.append(Path(env))
        self.roots.append(packaged_data_dir())

    def __call__(self, value: str, field_path: str) -> Path:
        p = Path(value).expanduser()
        if p.is_absolute():
            candidates = [p]
        else:
            candidates = [root / p for root in self.roots]
        for c in candidates:
            if c.is_file():
                return c
        raise ConfigFileNotFound(f"{field_path}: file not found: {value}")


def _read_toml(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigFileNotFound(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise InvalidValue(str(path), f"not valid TOML: {exc}") from None


def _load_profiles(cfg: _Section, resolve, expected_len, dt) -> tuple[LoadProfile, Any]:
    prof = cfg.section("profiles", required=True)
    if "loads" in prof:
        loads = read_load_profile(resolve(prof.string("loads"), prof.path("loads")), expected_len, dt)
    else:
        loads = LoadProfile(
            **{c: read_profile(resolve(prof.string(c, required=True), prof.path(c)), expected_len, dt) for c in CATEGORIES}
        )
    pv = read_profile(resolve(prof.string("pv", required=True), prof.path("pv")), len(loads), dt)
    scaling = prof.get("pv_scaling", "zero_net_energy")
    if scaling == "zero_net_energy":
        pv = apply_pv_scaling(pv, pv_scaling_factor(pv, loads.total()))
    elif scaling == "none":
        pass
    elif isinstance(scaling, (int, float)) and not isinstance(scaling, bool) and scaling > 0:
        pv = apply_pv_scaling(pv, float(scaling))
    else:
        raise InvalidValue(prof.path("pv_scaling"), 'expected "zero_net_energy", "none" or a positive k')
    return loads, pv


def _load_wiring(cfg: _Section, resolve, loads: LoadProfile, voltage: float) -> dict[str, WiringCircuit]:
    wcfg = cfg.section("wiring")
    safety = wcfg.number("safety_factor", DEFAULT_SAFETY_FACTOR)
    if safety < 1:
        raise InvalidValue(wcfg.path("safety_factor"), "must be >= 1")
    resistivity = wcfg.number("resistivity_ohm_m", COPPER_RESISTIVITY, positive=True)
    area_ratio = wcfg.number("area_ratio", 1.0, positive=True)
    table_path = wcfg.string("ampacity_table")
    table = AmpacityTable.from_csv(resolve(table_path, wcfg.path("ampacity_table"))) if table_path else None

    circuits = {}
    for cat in CATEGORIES:
        c = wcfg.section(cat)
        if "r_eq_mohm" in c:
            circuit = WiringCircuit(cat, c.number("r_eq_mohm", nonneg=True))
        elif "runs" in c:
            runs = c.get("runs")
            if not isinstance(runs, list) or not runs:
                raise InvalidValue(c.path("runs"), "expected a nonempty list of {run_length_m, items}")
            groups = []
            for i, run in enumerate(runs):
                r = _Section(run if isinstance(run, dict) else {}, f"{c.path('runs')}[{i}]")
                groups.append((r.number("run_length_m", required=True, nonneg=True), int(r.number("items", 1, positive=True))))
            circuit = circuit_from_runs(
                cat,
                groups,
                getattr(loads, cat).peak(),
                voltage,
                safety,
                table,
                c.number("cross_section_mm2", positive=True),
                resistivity,
            )
        else:
            circuit = WiringCircuit(cat, 0.0)
        if area_ratio != 1.0:
            circuit = WiringCircuit(cat, scale_resistance_by_area(circuit.r_eq, area_ratio), circuit.source)
        circuits[cat] = circuit
    return circuits


def _converter(cfg: _Section, role: str, peak: float, resolve) -> ConverterSpec:
    c = cfg.section(role, required=True)
    curve = EfficiencyCurve.from_csv(resolve(c.string("curve", required=True), c.path("curve")))
    unit = c.number("unit_nominal_kw", positive=True)
    count = c.number("parallel_count", positive=True)
    if count is not None and count != int(count):
        raise InvalidValue(c.path("parallel_count"), "must be an integer")
    if unit is None:
        # one unit rated at the peak unless a count is given
        n = int(count) if count else 1
        return ConverterSpec(role, max(peak, 1e-9) / n, n, curve)
    n = int(count) if count else parallel_count(peak, unit)
    return ConverterSpec(role, unit, n, curve)


def peak_bus_demand(loads: LoadProfile, wiring: dict[str, WiringCircuit], voltage: float) -> float:
    return max(
        sum(p + wiring_loss(wiring[c], p, voltage) for c, p in zip(CATEGORIES, row))
        for row in zip(*loads.series())
    )


def build_scenario(data: dict, base_dir: Path) -> Scenario:
    cfg = _Section(data)
    resolve = _Resolver(base_dir)
    voltage = cfg.number("bus_voltage", required=True, positive=True)
    expected_len = cfg.number("steps", positive=True)
    expected_len = int(expected_len) if expected_len else None
    dt = cfg.number("dt_hours", 1.0, positive=True)

    loads, pv = _load_profiles(cfg, resolve, expected_len, dt)
    wiring = _load_wiring(cfg, resolve, loads, voltage)

    conv = cfg.section("converters", required=True)
    pv_conv = _converter(conv, "pv", pv.peak(), resolve)
    pv_out_peak = pv.peak()
    ac_peak = max(peak_bus_demand(loads, wiring, voltage), pv_out_peak)
    ac_conv = _converter(conv, "ac_dc", ac_peak, resolve)

    b = cfg.section("battery")
    capacity = b.number("capacity_kwh", 0.0, nonneg=True)
    try:
        battery = BatterySpec(
            capacity,
            b.number("soc_min", 0.20),
            b.number("soc_max", 1.00),
            b.number("c_rate_divisor", 4.0, positive=True),
        )
    except ValueError as exc:
        raise InvalidValue(b.prefix, str(exc)) from None
    initial_soc = b.number("initial_soc")
    if initial_soc is not None and not battery.soc_min <= initial_soc <= battery.soc_max:
        raise InvalidValue(b.path("initial_soc"), "outside [soc_min, soc_max]")

    battery_curve = battery_unit = None
    bc = conv.section("battery")
    if capacity > 0 or "curve" in bc:
        battery_curve = EfficiencyCurve.from_csv(resolve(bc.string("curve", required=True), bc.path("curve")))
        battery_unit = bc.number("unit_nominal_kw", positive=True)

    return Scenario(
        bus_voltage=voltage,
        loads=loads,
        pv=pv,
        wiring=wiring,
        pv_converter=pv_conv,
        ac_dc_converter=ac_conv,
        battery=battery,
        battery_curve=battery_curve,
        battery_unit_nominal=battery_unit,
        initial_soc=initial_soc,
        label=cfg.string("label", "") or "",
    )


def _sweep_params(cfg: _Section) -> SweepParams:
    s = cfg.section("sweep")
    caps = s.get("capacities_kwh")
    if caps is None:
        caps = capacity_range(
            s.number("start_kwh", 2.4, positive=True),
            s.number("stop_kwh", 48.0, positive=True),
            s.number("step_kwh", 2.4, positive=True),
        )
    elif not isinstance(caps, list) or not caps or any(isinstance(c, bool) or not isinstance(c, (int, float)) or c < 0 for c in caps):
        raise InvalidValue(s.path("capacities_kwh"), "expected a nonempty list of capacities >= 0")
    return SweepParams(
        [float(c) for c in caps],
        s.number("slope_threshold", DEFAULT_SLOPE_THRESHOLD, positive=True),
        s.number("module_kwh", DEFAULT_MODULE_KWH, positive=True),
    )


def _matrix_params(cfg: _Section, base_dir: Path) -> MatrixParams:
    m = cfg.section("matrix", required=True)
    loads = m.get("load_models", required=True)
    volts = m.get("voltages", required=True)
    batts = m.get("battery_options", [False, True])
    template = m.string("scenario_template", required=True)
    if not (isinstance(loads, list) and loads and all(isinstance(x, str) for x in loads)):
        raise InvalidValue(m.path("load_models"), "expected a nonempty list of names")
    if not (isinstance(volts, list) and volts and all(isinstance(v, (int, float)) and v > 0 for v in volts)):
        raise InvalidValue(m.path("voltages"), "expected a nonempty list of positive voltages")
    if not (isinstance(batts, list) and batts and all(isinstance(b, bool) for b in batts)):
        raise InvalidValue(m.path("battery_options"), "expected a nonempty list of booleans")
    resolve = _Resolver(base_dir)
    scenarios = {}
    for load in loads:
        for volt in volts:
            name = template.format(load_model=load, voltage=f"{volt:g}")
            path = resolve(name, m.path("scenario_template"))
            scenarios[(load, float(volt))] = build_scenario(_read_toml(path), path.parent)
    return MatrixParams(list(loads), [float(v) for v in volts], list(batts), scenarios)


def load_config(path: str | Path, mode: str | None = None) -> RunConfig:
    """Read and validate a run configuration.

    ``mode`` overrides the file's ``mode`` key (the CLI passes its subcommand).
    """
    path = Path(path)
    data = _read_toml(path)
    cfg = _Section(data)
    mode = mode or cfg.string("mode", "single")
    if mode not in MODES:
        raise InvalidValue("mode", f"expected one of {MODES}, got {mode!r}")
    run = RunConfig(mode=mode, path=path, raw=data)
    out = cfg.string("output_dir")
    if out:
        run.out_dir = path.parent / out
    run.trace = bool(cfg.get("trace", False))
    try:
        if mode == "matrix":
            run.matrix = _matrix_params(cfg, path.parent)
        else:
            run.scenario = build_scenario(data, path.parent)
            if mode == "sweep":
                run.sweep = _sweep_params(cfg)
    except NanogridError:
        raise
    except ValueError as exc:
        # domain constructors reject out-of-range parameters with plain ValueError
        raise InvalidValue(str(path), str(exc)) from None
    return run
