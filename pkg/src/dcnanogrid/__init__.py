"""Hourly energy-flow simulator for a residential DC nanogrid.

PV, battery storage and a bidirectional grid interface share a DC bus with
four categories of loads. Losses are tracked per converter and for the
branch wiring so annual efficiency and loss breakdowns can be reported.
"""

from dcnanogrid.battery import BatterySpec, BatteryState, dispatch, max_transfer_power
from dcnanogrid.converters import (
    ConverterSpec,
    EfficiencyCurve,
    OperatingHistogram,
    convert_known_input,
    convert_known_output,
    efficiency_at,
    parallel_count,
    record_operating_point,
)
from dcnanogrid.engine import AnnualReport, Scenario, StepResult, simulate_step, simulate_year
from dcnanogrid.profiles import (
    LoadProfile,
    TimeSeries,
    apply_pv_scaling,
    parse_profile_csv,
    pv_scaling_factor,
)
from dcnanogrid.sweep import battery_capacity_sweep, scenario_matrix, select_capacity_knee
from dcnanogrid.wiring import (
    WireRun,
    WiringCircuit,
    equivalent_resistance,
    size_conductor,
    wire_resistance,
    wiring_loss,
)

__version__ = "0.1.0"

__all__ = [
    "AnnualReport",
    "BatterySpec",
    "BatteryState",
    "ConverterSpec",
    "EfficiencyCurve",
    "LoadProfile",
    "OperatingHistogram",
    "Scenario",
    "StepResult",
    "TimeSeries",
    "WireRun",
    "WiringCircuit",
    "apply_pv_scaling",
    "battery_capacity_sweep",
    "convert_known_input",
    "convert_known_output",
    "dispatch",
    "efficiency_at",
    "equivalent_resistance",
    "max_transfer_power",
    "parallel_count",
    "parse_profile_csv",
    "pv_scaling_factor",
    "record_operating_point",
    "scenario_matrix",
    "select_capacity_knee",
    "simulate_step",
    "simulate_year",
    "size_conductor",
    "wire_resistance",
    "wiring_loss",
]
