import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dcnanogrid.converters import (
    ConverterSpec,
    EfficiencyCurve,
    OperatingHistogram,
    bin_index,
    convert_known_input,
    convert_known_output,
    efficiency_at,
    parallel_count,
    record_operating_point,
)
from dcnanogrid.errors import MalformedRow, OverNominal

from conftest import DATA, curve

TWO_POINT = EfficiencyCurve.from_points([(0.25, 0.90), (0.50, 0.94)])


def test_interpolation_examples():
    assert math.isclose(efficiency_at(TWO_POINT, 0.375), 0.92, rel_tol=1e-15)
    assert efficiency_at(TWO_POINT, 0.25) == 0.90
    assert efficiency_at(TWO_POINT, 0.50) == 0.94
    assert efficiency_at(TWO_POINT, 0.05) == 0.90
    assert efficiency_at(TWO_POINT, 1.0) == 0.94
    with pytest.raises(ValueError):
        efficiency_at(TWO_POINT, -0.1)


def _linear_scan(points, x):
    # independent oracle: walk the segments
    if x <= points[0][0]:
        return points[0][1]
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return points[-1][1]


@pytest.mark.parametrize("name", ["pv_48v", "pv_220v", "ac_dc_48v", "ac_dc_220v", "battery_48v", "battery_220v"])
def test_fixture_curves_interpolate_like_oracle(name):
    c = curve(name)
    rng = random.Random(name)
    for _ in range(500):
        x = rng.uniform(0, 1.2)
        assert math.isclose(efficiency_at(c, x), _linear_scan(c.points, x), rel_tol=1e-12)


def test_ac_dc_fixture_shape():
    lo, hi = curve("ac_dc_48v"), curve("ac_dc_220v")
    for i in range(1, 90):
        assert efficiency_at(hi, i / 100) < efficiency_at(lo, i / 100)


@pytest.mark.parametrize(
    "fr, ef",
    [((0.5,), (0.9,)), ((0.5, 0.4), (0.9, 0.9)), ((0, 1), (0.9, 0.9)), ((0.5, 1), (0.9, 1.1)), ((0.5, 1), (0.9,))],
)
def test_curve_validation(fr, ef):
    with pytest.raises(ValueError):
        EfficiencyCurve(fr, ef)


def test_curve_csv_errors(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("f,e\n0.5,0.9\n0.4,0.9\n")
    with pytest.raises(MalformedRow):
        EfficiencyCurve.from_csv(p)
    p.write_text("f,e\n0.5,x\n")
    with pytest.raises(MalformedRow):
        EfficiencyCurve.from_csv(p)


@pytest.mark.parametrize("peak, unit, n", [(7, 3, 3), (6, 3, 2), (0, 3, 1), (0.1, 3, 1)])
def test_parallel_count(peak, unit, n):
    assert parallel_count(peak, unit) == n


def test_parallel_count_errors():
    with pytest.raises(ValueError):
        parallel_count(1, 0)
    with pytest.raises(ValueError):
        parallel_count(-1, 1)


def test_sized_for():
    spec = ConverterSpec.sized_for("pv", 7.0, 3.0, TWO_POINT)
    assert spec.parallel_count == 3
    assert spec.total_nominal == 9.0
    with pytest.raises(ValueError):
        ConverterSpec("inverter", 1.0, 1, TWO_POINT)
    with pytest.raises(ValueError):
        ConverterSpec("pv", 1.0, 0, TWO_POINT)


FLAT = ConverterSpec("ac_dc", 4.0, 1, EfficiencyCurve.flat(0.95))


def test_known_input_and_output_flat():
    out, loss = convert_known_input(FLAT, 1.0)
    assert math.isclose(out, 0.95) and math.isclose(loss, 0.05)
    inp, loss = convert_known_output(FLAT, 0.95)
    assert math.isclose(inp, 1.0) and math.isclose(loss, 0.05)
    assert convert_known_input(FLAT, 0) == (0.0, 0.0)
    assert convert_known_output(FLAT, 0) == (0.0, 0.0)


def test_fraction_uses_bank_total():
    spec = ConverterSpec("pv", 0.25, 2, TWO_POINT)
    out, _ = convert_known_input(spec, 0.1875)  # fraction 0.375 of 0.5 kW
    assert math.isclose(out, 0.1875 * 0.92)


def test_over_nominal():
    with pytest.raises(OverNominal):
        convert_known_input(FLAT, 4.01)
    with pytest.raises(OverNominal):
        convert_known_output(FLAT, 4.01)
    with pytest.raises(ValueError):
        convert_known_input(FLAT, -1)
    convert_known_input(FLAT, 4.0 * (1 + 1e-12))


@given(st.floats(min_value=0, max_value=4.0))
def test_known_side_loss_identity(p):
    spec = ConverterSpec("ac_dc", 4.0, 1, curve("ac_dc_48v"))
    out, loss = convert_known_input(spec, p)
    assert 0 <= out <= p
    assert math.isclose(out + loss, p, rel_tol=1e-12, abs_tol=1e-15)
    inp, loss = convert_known_output(spec, p)
    assert inp >= p
    assert math.isclose(inp - loss, p, rel_tol=1e-12, abs_tol=1e-15)


def test_bins():
    assert bin_index(1.5 / 4) == 1
    assert bin_index(1.0) == 3
    assert bin_index(0.25) == 0
    assert bin_index(0.5) == 1
    h = OperatingHistogram()
    for p in (0.4, 1.2, 2.4, 3.6):
        record_operating_point(h, p, 4.0)
    assert h.counts == [1, 1, 1, 1]
    assert h.shares() == [25.0] * 4


def test_histogram_idle_and_over():
    h = OperatingHistogram()
    assert h.shares() == [0.0] * 4 and h.idle_share() == 0.0
    record_operating_point(h, 0.0, 4.0)
    record_operating_point(h, 5.0, 4.0)
    assert h.idle_count == 1 and h.over_nominal_count == 1 and h.counts[3] == 1
    assert h.idle_share() == 50.0
    d = h.to_dict()
    assert d["bins"] == ["0-25", "25-50", "50-75", "75-100"]
    with pytest.raises(ValueError):
        record_operating_point(h, -1.0, 4.0)


@given(st.lists(st.floats(min_value=0, max_value=4), min_size=1, max_size=200))
def test_histogram_shares_sum(powers):
    h = OperatingHistogram()
    for p in powers:
        record_operating_point(h, p, 4.0)
    if h.active_count:
        assert math.isclose(sum(h.shares()), 100.0, abs_tol=1e-9)
    assert h.total_count == len(powers)
