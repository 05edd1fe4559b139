"""Report files: JSON summaries and plot-ready CSV tables.

Data files depend only on the results; timestamps and other run metadata go
to ``run_meta.json`` alone.
"""

from __future__ import annotations

import csv
import json
import platform
import time
from pathlib import Path
from typing import Iterable, Sequence

from dcnanogrid.converters import BIN_LABELS
from dcnanogrid.engine import LOSS_CATEGORIES, TRACE_COLUMNS, AnnualReport, StepResult
from dcnanogrid.errors import IoFailure
from dcnanogrid.sweep import Knee, MatrixCell, SweepPoint

SUMMARY = "summary.json"
LOSSES = "losses.csv"
HISTOGRAMS = "histograms.csv"
SWEEP = "sweep.csv"
KNEE = "knee.json"
MATRIX = "matrix.csv"
TRACE = "trace.csv"
RUN_META = "run_meta.json"


def _num(x: float) -> str:
    # repr round-trips doubles (17 significant digits at most)
    return repr(float(x))


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_num(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def summary_json(report: AnnualReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def losses_rows(report: AnnualReport):
    return [(k, report.loss_kwh[k], report.loss_share_pct[k]) for k in LOSS_CATEGORIES]


def histogram_rows(report: AnnualReport):
    rows = []
    for name, hist in report.histograms.items():
        idle = hist.idle_share()
        for label, share in zip(BIN_LABELS, hist.shares()):
            rows.append((name, label, share, idle))
    return rows


def write_annual(report: AnnualReport, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    return [
        _write(out_dir / SUMMARY, summary_json(report)),
        _write(out_dir / LOSSES, _csv_text(("category", "kwh", "share_pct"), losses_rows(report))),
        _write(out_dir / HISTOGRAMS, _csv_text(("converter", "bin", "share_pct", "idle_pct"), histogram_rows(report))),
    ]


def write_trace(steps: Sequence[StepResult], path: Path) -> Path:
    def cell(v):
        if isinstance(v, bool):
            return int(v)
        return v

    rows = ([cell(getattr(s, c)) for c in TRACE_COLUMNS] for s in steps)
    return _write(Path(path), _csv_text(TRACE_COLUMNS, rows))


def write_sweep(points: Sequence[SweepPoint], out_dir: Path, knee: Knee | None = None, **knee_info) -> list[Path]:
    out_dir = Path(out_dir)
    rows = [(p.capacity, p.efficiency_pct, p.bdt_hours) for p in points]
    written = [_write(out_dir / SWEEP, _csv_text(("capacity_kwh", "efficiency_pct", "bdt_hours"), rows))]
    if knee is not None:
        info = {"knee_capacity_kwh": knee.capacity, "no_knee": knee.no_knee, **knee_info}
        written.append(_write(out_dir / KNEE, json.dumps(info, indent=2) + "\n"))
    return written


def cell_name(cell: MatrixCell) -> str:
    return f"{cell.load_model}_{cell.bus_voltage:g}V_{'battery' if cell.battery_enabled else 'nobattery'}"


def write_matrix(cells: Sequence[MatrixCell], out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    rows = [
        (c.load_model, f"{c.bus_voltage:g}", str(c.battery_enabled).lower(), c.report.efficiency_pct) for c in cells
    ]
    written = [_write(out_dir / MATRIX, _csv_text(("load_model", "voltage", "battery", "efficiency_pct"), rows))]
    for c in cells:
        written.append(_write(out_dir / "cells" / f"{cell_name(c)}.json", summary_json(c.report)))
    return written


def emit_report(result, out_dir: Path) -> list[Path]:
    """Write the file set for an annual report, sweep points or matrix cells."""
    if isinstance(result, AnnualReport):
        return write_annual(result, out_dir)
    result = list(result)
    if result and all(isinstance(r, SweepPoint) for r in result):
        return write_sweep(result, out_dir)
    if result and all(isinstance(r, MatrixCell) for r in result):
        return write_matrix(result, out_dir)
    raise TypeError(f"nothing to report for {type(result).__name__}")


def write_run_meta(out_dir: Path, **info) -> Path:
    from dcnanogrid import __version__

    meta = {
        "version": __version__,
        "python": platform.python_version(),
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        **info,
    }
    return _write(Path(out_dir) / RUN_META, json.dumps(meta, indent=2, default=str) + "\n")
