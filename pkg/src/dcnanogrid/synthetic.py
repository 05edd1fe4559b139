"""Seeded synthetic profiles standing in for measured load and PV data.

The shipped fixture files under ``data/profiles`` were written by
:func:`write_fixtures` with the default seeds below; rerunning it reproduces
them byte for byte. The climate is a hot-humid cooling-dominated site near
28.5 N, so HVAC load peaks on summer afternoons.

    python -m dcnanogrid.synthetic OUT_DIR
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from dcnanogrid.profiles import (
    CATEGORIES,
    HOURS_PER_YEAR,
    LoadProfile,
    TimeSeries,
    format_load_profile_csv,
    format_profile_csv,
)

LATITUDE_DEG = 28.5
PV_SEED = 20_2106
LOAD_SEEDS = {"low": 11, "base": 23, "high": 37}

# (hvac kW per degC above setpoint, hvac lag behind outdoor temperature in
#  hours, lighting peak kW, equipment base kW, equipment evening kW,
#  water heater event kW). Larger houses carry more thermal mass.
LOAD_MODELS = {
    "low": (0.13, 1, 0.30, 0.22, 0.35, 1.1),
    "base": (0.26, 4, 0.60, 0.45, 0.75, 2.1),
    "high": (0.45, 7, 1.05, 0.80, 1.30, 3.6),
}


def _hours(n_days: int):
    h = np.arange(24 * n_days)
    return h // 24, h % 24


def pv_plant_profile(n_days: int = 365, seed: int = PV_SEED) -> np.ndarray:
    """PV output per kW of installed capacity, hourly."""
    rng = np.random.default_rng(seed)
    day, hour = _hours(n_days)
    decl = np.radians(23.45) * np.sin(2 * np.pi * (284 + day + 1) / 365)
    omega = np.radians(15.0 * (hour + 0.5 - 12.0))
    lat = np.radians(LATITUDE_DEG)
    sin_el = np.sin(lat) * np.sin(decl) + np.cos(lat) * np.cos(decl) * np.cos(omega)
    clear = np.clip(sin_el, 0.0, None) ** 1.15
    # clear, partly cloudy and overcast days
    kind = rng.choice(3, size=n_days, p=[0.55, 0.30, 0.15])
    lo = np.array([0.80, 0.40, 0.08])[kind]
    hi = np.array([1.00, 0.80, 0.35])[kind]
    daily = rng.uniform(lo, hi)
    hourly = np.clip(rng.normal(1.0, 0.08, size=day.size), 0.6, 1.2)
    pv = 0.82 * clear * daily[day] * hourly
    return np.round(np.clip(pv, 0.0, 1.0), 6)


def _temperature(day, hour, rng) -> np.ndarray:
    seasonal = 23.0 + 5.5 * np.sin(2 * np.pi * (day - 105) / 365)
    diurnal = 4.5 * np.sin(2 * np.pi * (hour - 9) / 24)
    weather = np.repeat(rng.normal(0.0, 1.5, size=day.size // 24), 24)
    return seasonal + diurnal + weather


def load_profile_arrays(model: str, n_days: int = 365, seed: int | None = None) -> dict[str, np.ndarray]:
    hvac_k, lag, light_pk, ie_base, ie_eve, wh_pk = LOAD_MODELS[model]
    rng = np.random.default_rng(LOAD_SEEDS[model] if seed is None else seed)
    day, hour = _hours(n_days)
    n = day.size

    temp = np.roll(_temperature(day, hour, rng), lag)
    cooling = np.clip(temp - 24.0, 0.0, None)
    heating = np.clip(16.0 - temp, 0.0, None)
    hvac = hvac_k * (cooling + 0.6 * heating) * rng.uniform(0.7, 1.3, size=n)
    hvac += np.where(cooling + heating > 0, 0.05, 0.02)

    winter = 0.5 + 0.5 * np.cos(2 * np.pi * (day - 355) / 365)
    evening = np.exp(-0.5 * ((hour - 20.0) / 1.6) ** 2)
    morning = np.exp(-0.5 * ((hour - 6.5) / 0.8) ** 2)
    lighting = light_pk * (0.05 + (0.8 + 0.3 * winter) * evening + 0.35 * morning)
    lighting *= rng.uniform(0.8, 1.2, size=n)

    ie = ie_base + ie_eve * np.exp(-0.5 * ((hour - 19.0) / 2.5) ** 2)
    ie *= rng.uniform(0.75, 1.25, size=n)

    wh_shape = np.exp(-0.5 * ((hour - 7.0) / 1.0) ** 2) + 0.8 * np.exp(-0.5 * ((hour - 19.5) / 1.2) ** 2)
    wh = wh_pk * (0.03 + wh_shape * rng.uniform(0.3, 1.0, size=n)) * (0.8 + 0.4 * winter)

    arrays = {"hvac": hvac, "lighting": lighting, "interior_equipment": ie, "water_heater": wh}
    return {k: np.round(v, 6) for k, v in arrays.items()}


def load_profile(model: str, n_days: int = 365) -> LoadProfile:
    arrays = load_profile_arrays(model, n_days)
    return LoadProfile(**{c: TimeSeries(tuple(arrays[c].tolist())) for c in CATEGORIES})


def write_fixtures(out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    pv = pv_plant_profile()
    assert pv.size == HOURS_PER_YEAR
    path = out / "pv_plant.csv"
    path.write_text(format_profile_csv(pv.tolist()), encoding="utf-8")
    written.append(path)
    for model in LOAD_MODELS:
        path = out / f"{model}_loads.csv"
        path.write_text(format_load_profile_csv(load_profile(model)), encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_fixtures(sys.argv[1] if len(sys.argv) > 1 else "."):
        print(p)
