import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dcnanogrid.errors import CurrentExceedsTable, EmptyCategory, MalformedRow
from dcnanogrid.wiring import (
    COPPER_RESISTIVITY,
    AmpacityTable,
    WireRun,
    WiringCircuit,
    circuit_from_runs,
    equivalent_resistance,
    scale_resistance_by_area,
    size_conductor,
    wire_resistance,
    wiring_loss,
)

from conftest import DATA


def test_default_table():
    assert AmpacityTable.default().entries == ((1.5, 16), (2.5, 20), (4, 28), (6, 36), (10, 50))


@pytest.mark.parametrize("peak, area", [(10, 1.5), (0, 1.5), (16 / 1.5, 1.5), (18, 4), (33.3, 10)])
def test_size_conductor(peak, area):
    assert size_conductor(peak, 1.5) == area


def test_size_conductor_20A():
    # 30 A required; 4 mm^2 is rated 28 A, so the next size up is needed
    assert size_conductor(20, 1.5) == 6


def test_size_conductor_too_big():
    with pytest.raises(CurrentExceedsTable):
        size_conductor(100, 1.5)


def test_extended_table_covers_larger_currents():
    table = AmpacityTable.from_csv(DATA / "ampacity_extended.csv")
    assert size_conductor(100, 1.5, table) > 10


def test_size_conductor_arguments():
    with pytest.raises(ValueError):
        size_conductor(-1)
    with pytest.raises(ValueError):
        size_conductor(1, 0.9)


def test_bad_table(tmp_path):
    with pytest.raises(ValueError):
        AmpacityTable(((2.5, 20), (1.5, 16)))
    p = tmp_path / "t.csv"
    p.write_text("mm2,A\n1.5,x\n")
    with pytest.raises(MalformedRow):
        AmpacityTable.from_csv(p)


def test_wire_resistance():
    assert math.isclose(wire_resistance(WireRun(10, 2.5, 1.72e-8)), 0.1376, rel_tol=1e-12)
    assert wire_resistance(WireRun(0, 2.5)) == 0


def test_equivalent_resistance_examples():
    assert equivalent_resistance([10]) == 10
    assert equivalent_resistance([10, 10]) == 5
    with pytest.raises(EmptyCategory):
        equivalent_resistance([])
    with pytest.raises(ValueError):
        equivalent_resistance([1, -1])


def test_wiring_loss_hvac_example():
    c = WiringCircuit("hvac", 21.35)
    i = 1000 / 48
    assert math.isclose(i, 20.833, abs_tol=5e-4)
    loss = wiring_loss(c, 1.0, 48)
    assert math.isclose(loss, 0.009266, abs_tol=5e-7)
    assert wiring_loss(c, 0.0, 48) == 0
    ratio = wiring_loss(c, 1.0, 220) / loss
    assert math.isclose(ratio, (48 / 220) ** 2, rel_tol=1e-12)


def test_area_scaling():
    assert scale_resistance_by_area(10, 1) == 10
    assert scale_resistance_by_area(10, 4) == 20
    assert scale_resistance_by_area(10, 0.25) == 5
    with pytest.raises(ValueError):
        scale_resistance_by_area(10, 0)


def test_circuit_validation():
    with pytest.raises(ValueError):
        WiringCircuit("garage", 1.0)
    with pytest.raises(ValueError):
        WiringCircuit("hvac", -1.0)


def test_circuit_from_runs_matches_hand_calculation():
    # 2 kW at 48 V -> 41.7 A * 1.5 = 62.5 A: beyond the default table
    with pytest.raises(CurrentExceedsTable):
        circuit_from_runs("hvac", [(10, 1)], 2.0, 48)
    c = circuit_from_runs("lighting", [(5, 2), (10, 1)], 0.5, 48)
    # 10.4 A * 1.5 = 15.6 A -> 1.5 mm^2
    r = [COPPER_RESISTIVITY * 2 * L / 1.5e-6 for L in (5, 5, 10)]
    assert c.source == "computed"
    assert math.isclose(c.r_eq, sum(r) / 9 * 1000, rel_tol=1e-12)


def _brute_force_loss(items, current):
    n = len(items)
    return sum(r * (current / n) ** 2 for r in items)


def test_equivalent_resistance_oracle_random():
    rng = random.Random(1)
    for _ in range(1000):
        items = [rng.uniform(0.0, 0.5) for _ in range(rng.randint(1, 40))]
        current = rng.uniform(0, 80)
        expected = _brute_force_loss(items, current)
        got = equivalent_resistance(items) * current**2
        assert math.isclose(got, expected, rel_tol=1e-12, abs_tol=1e-300)


@given(
    st.lists(st.floats(min_value=0, max_value=10), min_size=1, max_size=30),
    st.floats(min_value=0, max_value=200),
)
def test_equivalent_resistance_property(items, current):
    expected = _brute_force_loss(items, current)
    assert math.isclose(equivalent_resistance(items) * current**2, expected, rel_tol=1e-12, abs_tol=1e-200)
