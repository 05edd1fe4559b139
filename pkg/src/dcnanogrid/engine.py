"""Hourly energy balance of the nanogrid bus and annual loss accounting.

Each step resolves the bus in topology order: loads plus their wiring loss
form the demand, PV is forwarded through its converter, the battery takes or
covers the difference, and the grid interface balances whatever remains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from typing import Mapping

from dcnanogrid.battery import BatterySpec, BatteryState, battery_converter, dispatch
from dcnanogrid.converters import (
    ConverterSpec,
    EfficiencyCurve,
    OperatingHistogram,
    convert_known_input,
    convert_known_output,
    record_operating_point,
)
from dcnanogrid.errors import ConservationViolation, LengthMismatch, ZeroLoadYear
from dcnanogrid.profiles import CATEGORIES, LoadProfile, TimeSeries
from dcnanogrid.wiring import WiringCircuit, wiring_loss

STEP_TOLERANCE = 1e-9  # kW, scaled by the largest flow in the step
ANNUAL_TOLERANCE = 1e-6  # relative
_SNAP = 1e-12

LOSS_CATEGORIES = ("pv_converter", "ac_dc_converter", "battery_converter", "wiring")


@dataclass(frozen=True)
class Scenario:
    bus_voltage: float
    loads: LoadProfile
    pv: TimeSeries
    wiring: Mapping[str, WiringCircuit]
    pv_converter: ConverterSpec
    ac_dc_converter: ConverterSpec
    battery: BatterySpec = field(default_factory=BatterySpec)
    battery_curve: EfficiencyCurve | None = None
    battery_unit_nominal: float | None = None
    initial_soc: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.bus_voltage <= 0:
            raise ValueError(f"bus voltage must be > 0, got {self.bus_voltage}")
        if len(self.pv) != len(self.loads) or self.pv.dt != self.loads.dt:
            raise LengthMismatch(
                f"pv ({len(self.pv)} x {self.pv.dt} h) and loads "
                f"({len(self.loads)} x {self.loads.dt} h) are not aligned"
            )
        missing = [c for c in CATEGORIES if c not in self.wiring]
        if missing:
            raise ValueError(f"no wiring circuit for {missing}")
        if self.battery.present and self.battery_curve is None:
            raise ValueError("a battery needs a battery converter curve")

    @property
    def n_steps(self) -> int:
        return len(self.pv)

    @property
    def dt(self) -> float:
        return self.pv.dt

    @cached_property
    def battery_converter(self) -> ConverterSpec | None:
        if not self.battery.present:
            return None
        return battery_converter(self.battery, self.battery_curve, self.battery_unit_nominal)

    def with_battery_capacity(self, capacity: float) -> "Scenario":
        return replace(self, battery=replace(self.battery, capacity=capacity))

    def without_battery(self) -> "Scenario":
        return self.with_battery_capacity(0.0)

    def initial_battery_state(self) -> BatteryState:
        if not self.battery.present:
            return BatteryState(self.battery.soc_min)
        return self.battery.initial_state(self.initial_soc)


@dataclass(frozen=True)
class StepResult:
    t: int
    load_hvac: float
    load_lighting: float
    load_interior_equipment: float
    load_water_heater: float
    wiring_loss_hvac: float
    wiring_loss_lighting: float
    wiring_loss_interior_equipment: float
    wiring_loss_water_heater: float
    pv_input: float
    pv_output: float
    pv_loss: float
    excess: float
    battery_side: float
    battery_bus: float
    battery_loss: float
    soc: float
    battery_disconnected: bool
    grid_export_bus: float
    grid_export_grid: float
    grid_import_bus: float
    grid_import_grid: float
    ac_dc_loss: float
    residual: float

    @property
    def load_total(self) -> float:
        return self.load_hvac + self.load_lighting + self.load_interior_equipment + self.load_water_heater

    @property
    def wiring_loss_total(self) -> float:
        return (
            self.wiring_loss_hvac
            + self.wiring_loss_lighting
            + self.wiring_loss_interior_equipment
            + self.wiring_loss_water_heater
        )


TRACE_COLUMNS = tuple(f.name for f in fields(StepResult))


def new_histograms(scenario: Scenario) -> dict[str, OperatingHistogram]:
    hists = {"pv": OperatingHistogram(), "ac_dc": OperatingHistogram()}
    if scenario.battery_converter is not None:
        hists["battery"] = OperatingHistogram()
    return hists


def simulate_step(
    scenario: Scenario,
    t: int,
    battery_state: BatteryState,
    histograms: Mapping[str, OperatingHistogram] | None = None,
) -> tuple[StepResult, BatteryState]:
    if not 0 <= t < scenario.n_steps:
        raise IndexError(f"timestep {t} outside 0..{scenario.n_steps - 1}")
    v = scenario.bus_voltage

    loads = [getattr(scenario.loads, c)[t] for c in CATEGORIES]
    wiring = [wiring_loss(scenario.wiring[c], p, v) for c, p in zip(CATEGORIES, loads)]
    demand = math.fsum(loads) + math.fsum(wiring)

    pv_in = scenario.pv[t]
    pv_out, pv_loss = convert_known_input(scenario.pv_converter, pv_in)
    excess = pv_out - demand

    action, new_state = dispatch(
        battery_state, scenario.battery, excess, scenario.battery_converter, scenario.dt
    )

    residual = excess - action.bus_side_power
    if abs(residual) < _SNAP * max(1.0, demand, pv_out):
        residual = 0.0
    ac_dc = scenario.ac_dc_converter
    export_bus = export_grid = import_bus = import_grid = ac_dc_loss = 0.0
    if residual > 0:
        export_bus = residual
        export_grid, ac_dc_loss = convert_known_input(ac_dc, export_bus)
    elif residual < 0:
        import_bus = -residual
        import_grid, ac_dc_loss = convert_known_output(ac_dc, import_bus)

    if histograms is not None:
        record_operating_point(histograms["pv"], pv_in, scenario.pv_converter.total_nominal)
        record_operating_point(histograms["ac_dc"], export_bus + import_bus, ac_dc.total_nominal)
        if "battery" in histograms:
            record_operating_point(
                histograms["battery"], abs(action.battery_side_power), scenario.battery_converter.total_nominal
            )

    charge_bus = max(action.bus_side_power, 0.0)
    discharge_bus = max(-action.bus_side_power, 0.0)
    supply = pv_out + discharge_bus + import_bus
    consumption = math.fsum(loads) + math.fsum(wiring) + charge_bus + export_bus
    balance = supply - consumption
    scale = max(1.0, supply, consumption)
    if abs(balance) > STEP_TOLERANCE * scale:
        raise ConservationViolation(f"step {t}: bus imbalance {balance:.3e} kW")

    result = StepResult(
        t,
        *loads,
        *wiring,
        pv_in,
        pv_out,
        pv_loss,
        excess,
        action.battery_side_power,
        action.bus_side_power,
        action.converter_loss,
        new_state.soc,
        new_state.disconnected,
        export_bus,
        export_grid,
        import_bus,
        import_grid,
        ac_dc_loss,
        balance,
    )
    return result, new_state


@dataclass
class AnnualReport:
    label: str
    bus_voltage: float
    n_steps: int
    dt: float
    battery_capacity_kwh: float
    load_kwh: float
    load_by_category_kwh: dict[str, float]
    pv_generated_kwh: float
    pv_delivered_kwh: float
    grid_import_kwh: float
    grid_export_kwh: float
    grid_import_bus_kwh: float
    grid_export_bus_kwh: float
    battery_charge_kwh: float
    battery_discharge_kwh: float
    loss_kwh: dict[str, float]
    loss_share_pct: dict[str, float]
    efficiency_pct: float
    bdt_hours: float
    initial_soc: float
    final_soc: float
    net_soc_change_kwh: float
    histograms: dict[str, OperatingHistogram]

    @property
    def total_loss_kwh(self) -> float:
        return math.fsum(self.loss_kwh.values())

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "histograms":
                value = {k: h.to_dict() for k, h in value.items()}
            elif isinstance(value, dict):
                value = dict(value)
            out[f.name] = value
        return out


@dataclass
class Totals:
    """Running sums collected by :func:`simulate_year`, in kWh."""

    label: str
    bus_voltage: float
    n_steps: int
    dt: float
    battery_capacity_kwh: float
    load_by_category_kwh: dict[str, float]
    pv_generated_kwh: float
    pv_delivered_kwh: float
    grid_import_kwh: float
    grid_export_kwh: float
    grid_import_bus_kwh: float
    grid_export_bus_kwh: float
    battery_charge_kwh: float
    battery_discharge_kwh: float
    loss_kwh: dict[str, float]
    bdt_hours: float
    initial_soc: float
    final_soc: float
    histograms: dict[str, OperatingHistogram]


def _sum(steps, attr: str, dt: float) -> float:
    return math.fsum(getattr(s, attr) for s in steps) * dt


def accumulate(scenario: Scenario, steps, initial: BatteryState, final: BatteryState, histograms) -> Totals:
    dt = scenario.dt
    loss = {
        "pv_converter": _sum(steps, "pv_loss", dt),
        "ac_dc_converter": _sum(steps, "ac_dc_loss", dt),
        "battery_converter": _sum(steps, "battery_loss", dt),
        "wiring": math.fsum(_sum(steps, f"wiring_loss_{c}", dt) for c in CATEGORIES),
    }
    return Totals(
        label=scenario.label,
        bus_voltage=scenario.bus_voltage,
        n_steps=len(steps),
        dt=dt,
        battery_capacity_kwh=scenario.battery.capacity,
        load_by_category_kwh={c: _sum(steps, f"load_{c}", dt) for c in CATEGORIES},
        pv_generated_kwh=_sum(steps, "pv_input", dt),
        pv_delivered_kwh=_sum(steps, "pv_output", dt),
        grid_import_kwh=_sum(steps, "grid_import_grid", dt),
        grid_export_kwh=_sum(steps, "grid_export_grid", dt),
        grid_import_bus_kwh=_sum(steps, "grid_import_bus", dt),
        grid_export_bus_kwh=_sum(steps, "grid_export_bus", dt),
        battery_charge_kwh=math.fsum(max(s.battery_side, 0.0) for s in steps) * dt,
        battery_discharge_kwh=math.fsum(max(-s.battery_side, 0.0) for s in steps) * dt,
        loss_kwh=loss,
        bdt_hours=final.bdt_hours,
        initial_soc=initial.soc,
        final_soc=final.soc,
        histograms=histograms,
    )


def compute_metrics(totals: Totals) -> AnnualReport:
    """Express each loss as a percentage of load energy; efficiency is the remainder."""
    load = math.fsum(totals.load_by_category_kwh.values())
    if load <= 0:
        raise ZeroLoadYear("total load energy is zero; efficiency is undefined")
    shares = {k: 100.0 * totals.loss_kwh[k] / load for k in LOSS_CATEGORIES}
    efficiency = 100.0 - math.fsum(shares.values())
    net_stored = (totals.final_soc - totals.initial_soc) * totals.battery_capacity_kwh
    return AnnualReport(
        label=totals.label,
        bus_voltage=totals.bus_voltage,
        n_steps=totals.n_steps,
        dt=totals.dt,
        battery_capacity_kwh=totals.battery_capacity_kwh,
        load_kwh=load,
        load_by_category_kwh=totals.load_by_category_kwh,
        pv_generated_kwh=totals.pv_generated_kwh,
        pv_delivered_kwh=totals.pv_delivered_kwh,
        grid_import_kwh=totals.grid_import_kwh,
        grid_export_kwh=totals.grid_export_kwh,
        grid_import_bus_kwh=totals.grid_import_bus_kwh,
        grid_export_bus_kwh=totals.grid_export_bus_kwh,
        battery_charge_kwh=totals.battery_charge_kwh,
        battery_discharge_kwh=totals.battery_discharge_kwh,
        loss_kwh={k: totals.loss_kwh[k] for k in LOSS_CATEGORIES},
        loss_share_pct=shares,
        efficiency_pct=efficiency,
        bdt_hours=totals.bdt_hours,
        initial_soc=totals.initial_soc,
        final_soc=totals.final_soc,
        net_soc_change_kwh=net_stored,
        histograms=totals.histograms,
    )


def annual_balance_residual(report: AnnualReport) -> float:
    """Relative mismatch of the energy entering vs leaving the system boundary."""
    inflow = report.pv_generated_kwh + report.grid_import_kwh
    outflow = report.load_kwh + report.grid_export_kwh + report.total_loss_kwh + report.net_soc_change_kwh
    return abs(inflow - outflow) / max(inflow, outflow, 1e-300)


def simulate_year(scenario: Scenario, trace: list | None = None) -> AnnualReport:
    """Run every timestep of ``scenario`` and return the aggregated report.

    Pass a list as ``trace`` to collect the per-step :class:`StepResult` rows.
    """
    if scenario.loads.total().energy() <= 0:
        raise ZeroLoadYear("total load energy is zero; efficiency is undefined")
    state = initial = scenario.initial_battery_state()
    histograms = new_histograms(scenario)
    steps = []
    for t in range(scenario.n_steps):
        step, state = simulate_step(scenario, t, state, histograms)
        steps.append(step)
    report = compute_metrics(accumulate(scenario, steps, initial, state, histograms))
    mismatch = annual_balance_residual(report)
    if mismatch > ANNUAL_TOLERANCE:
        raise ConservationViolation(f"annual energy balance off by {mismatch:.3e} (relative)")
    if trace is not None:
        trace.extend(steps)
    return report
