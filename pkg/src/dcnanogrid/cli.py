"""Command-line entry point: ``dcnanogrid {simulate,sweep,matrix} CONFIG``.

Exit codes: 0 success, 2 configuration error, 3 input data error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from dcnanogrid import report
from dcnanogrid.config import FIXTURES_ENV, load_config
from dcnanogrid.engine import simulate_year
from dcnanogrid.errors import ConfigError, InvariantViolation, NanogridError
from dcnanogrid.sweep import (
    MatrixCellError,
    battery_capacity_sweep,
    scenario_matrix,
    select_capacity_knee,
    snap_to_module,
)

log = logging.getLogger("dcnanogrid")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INVARIANT = 4

COMMANDS = {"simulate": "single", "sweep": "sweep", "matrix": "matrix"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcnanogrid",
        description="Hourly loss accounting for a residential DC nanogrid.",
        epilog=f"Relative data paths fall back to ${FIXTURES_ENV}, then to the bundled fixtures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run one scenario over its full profile"),
        ("sweep", "sweep battery capacity and pick the downtime knee"),
        ("matrix", "run the load model x voltage x battery matrix"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", type=Path)
        p.add_argument("--out", type=Path, help="output directory (default: ./out/<config stem>)")
        p.add_argument("--trace", action="store_true", help="also write per-step trace.csv")
        p.add_argument("--quiet", action="store_true")
        if name != "simulate":
            p.add_argument("--workers", type=int, default=None, help="parallel processes")
    return parser


def _out_dir(args, run) -> Path:
    if args.out:
        return args.out
    if run.out_dir:
        return run.out_dir
    return Path("out") / args.config.stem


def _simulate(run, out: Path, trace: bool) -> str:
    steps = [] if trace else None
    rep = simulate_year(run.scenario, trace=steps)
    report.emit_report(rep, out)
    if trace:
        report.write_trace(steps, out / report.TRACE)
    return f"{rep.label or run.path.stem}: efficiency {rep.efficiency_pct:.2f}%  BDT {rep.bdt_hours:g} h"


def _sweep(run, out: Path, workers) -> str:
    params = run.sweep
    points = battery_capacity_sweep(run.scenario, params.capacities, workers)
    lines = []
    if len(points) >= 2:
        knee = select_capacity_knee(points, params.slope_threshold)
        chosen = snap_to_module(knee.capacity, params.module_kwh)
        report.write_sweep(
            points,
            out,
            knee,
            slope_threshold=params.slope_threshold,
            module_kwh=params.module_kwh,
            selected_capacity_kwh=chosen,
        )
        lines.append(f"knee {knee.capacity:g} kWh -> {chosen:g} kWh" + (" (no knee)" if knee.no_knee else ""))
    else:
        report.write_sweep(points, out)
    lines.insert(0, f"{len(points)} capacities swept")
    return "; ".join(lines)


def _matrix(run, out: Path, workers) -> str:
    m = run.matrix
    cells = scenario_matrix(m.scenarios, m.load_models, m.voltages, m.battery_options, workers)
    report.write_matrix(cells, out)
    return "\n".join(
        f"{c.load_model:>6} {c.bus_voltage:>5g} V  battery={'yes' if c.battery_enabled else 'no ':3}  "
        f"{c.efficiency_pct:.2f}%"
        for c in cells
    )


def exit_code(exc: NanogridError) -> int:
    if isinstance(exc, MatrixCellError):
        exc = exc.cause
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, InvariantViolation):
        return EXIT_INVARIANT
    return EXIT_DATA


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        run = load_config(args.config, COMMANDS[args.command])
        out = _out_dir(args, run)
        if run.mode == "single":
            message = _simulate(run, out, args.trace or run.trace)
        elif run.mode == "sweep":
            message = _sweep(run, out, args.workers)
        else:
            message = _matrix(run, out, args.workers)
        report.write_run_meta(out, command=args.command, config=str(args.config))
    except NanogridError as exc:
        code = exit_code(exc)
        kind = {EXIT_CONFIG: "config error", EXIT_INVARIANT: "invariant violated"}.get(code, "data error")
        log.error("%s: %s", kind, exc)
        return code
    if not args.quiet:
        print(message)
        print(f"reports written to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
