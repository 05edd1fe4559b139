"""Rule-based battery controller with downtime accounting.

The battery charges only from positive PV excess on the bus and discharges
only into a deficit. Power is capped at ``capacity / c_rate_divisor`` on the
battery terminals and state of charge is kept inside ``[soc_min, soc_max]``.
Once the floor is reached with no surplus the battery is disconnected and
every such step adds to the downtime counter.

The cells themselves are lossless; all loss sits in the battery converter.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from dcnanogrid.converters import ConverterSpec, convert_known_input, convert_known_output, parallel_count


@dataclass(frozen=True)
class BatterySpec:
    capacity: float = 0.0  # kWh
    soc_min: float = 0.20
    soc_max: float = 1.00
    c_rate_divisor: float = 4.0  # hours

    def __post_init__(self):
        if self.capacity < 0:
            raise ValueError(f"capacity must be >= 0, got {self.capacity}")
        if not (0 <= self.soc_min < self.soc_max <= 1):
            raise ValueError(f"need 0 <= soc_min < soc_max <= 1, got {self.soc_min}, {self.soc_max}")
        if self.c_rate_divisor <= 0:
            raise ValueError(f"c_rate_divisor must be > 0, got {self.c_rate_divisor}")

    @property
    def present(self) -> bool:
        return self.capacity > 0

    @property
    def default_initial_soc(self) -> float:
        return 0.5 * (self.soc_min + self.soc_max)

    def initial_state(self, soc: float | None = None) -> "BatteryState":
        soc = self.default_initial_soc if soc is None else soc
        if not (self.soc_min <= soc <= self.soc_max):
            raise ValueError(f"initial soc {soc} outside [{self.soc_min}, {self.soc_max}]")
        return BatteryState(soc)


@dataclass(frozen=True)
class BatteryState:
    soc: float
    disconnected: bool = False
    bdt_hours: float = 0.0


@dataclass(frozen=True)
class BatteryAction:
    battery_side_power: float = 0.0  # kW, + charging / - discharging
    bus_side_power: float = 0.0  # kW drawn from (+) or delivered to (-) the bus
    converter_loss: float = 0.0

    @property
    def battery_converter_throughput(self) -> float:
        return abs(self.battery_side_power)


IDLE = BatteryAction()


def max_transfer_power(spec: BatterySpec) -> float:
    return spec.capacity / spec.c_rate_divisor


def battery_converter(spec: BatterySpec, curve, unit_nominal: float | None = None) -> ConverterSpec | None:
    """Converter bank rated exactly at the battery's maximum transfer power.

    With ``unit_nominal`` the bank is split into that many parallel units,
    each derated so the aggregate equals the transfer limit.
    """
    pmax = max_transfer_power(spec)
    if pmax <= 0:
        return None
    n = parallel_count(pmax, unit_nominal) if unit_nominal else 1
    return ConverterSpec("battery", pmax / n, n, curve)


def dispatch(
    state: BatteryState,
    spec: BatterySpec,
    excess_bus_power: float,
    converter: ConverterSpec | None,
    dt: float = 1.0,
) -> tuple[BatteryAction, BatteryState]:
    """Advance the battery one step given the bus surplus (+) or deficit (-)."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not spec.present or converter is None:
        return IDLE, state

    pmax = max_transfer_power(spec)
    nominal = converter.total_nominal

    if excess_bus_power > 0:
        offered = min(excess_bus_power, nominal)
        deliverable, loss = convert_known_input(converter, offered)
        headroom = (spec.soc_max - state.soc) * spec.capacity / dt
        charge = min(deliverable, pmax, headroom)
        if charge <= 0:
            return IDLE, replace(state, disconnected=False)
        if charge < deliverable:
            bus, _ = convert_known_output(converter, charge)
            # known-side lookups disagree slightly; never draw more than offered
            bus = min(bus, offered)
            loss = bus - charge
        else:
            bus = offered
        if charge == headroom:
            soc = spec.soc_max
        else:
            soc = min(state.soc + charge * dt / spec.capacity, spec.soc_max)
        action = BatteryAction(charge, bus, loss)
        return action, BatteryState(soc, False, state.bdt_hours)

    at_floor = state.soc <= spec.soc_min
    if at_floor:
        return IDLE, BatteryState(spec.soc_min, True, state.bdt_hours + dt)
    if excess_bus_power == 0 or state.disconnected:
        return IDLE, state

    needed = min(-excess_bus_power, nominal)
    required, loss = convert_known_output(converter, needed)
    available = (state.soc - spec.soc_min) * spec.capacity / dt
    discharge = min(required, pmax, available)
    if discharge < required:
        delivered, _ = convert_known_input(converter, discharge)
        delivered = min(delivered, needed)
        loss = discharge - delivered
    else:
        delivered = needed
    if discharge == available:
        soc = spec.soc_min
    else:
        soc = max(state.soc - discharge * dt / spec.capacity, spec.soc_min)
    action = BatteryAction(-discharge, -delivered, loss)
    return action, BatteryState(soc, state.disconnected, state.bdt_hours)
