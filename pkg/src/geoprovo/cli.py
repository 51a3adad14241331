"""Command line entry point: ``simulate``, ``bench`` and ``plot``.

Exit codes: 0 success, 2 invalid input, 3 solver failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .baselines import OracleCapError
from .harness import emit_plot, run_suite
from .planner import METHODS, run_closed_loop
from .scenario import Scenario, ScenarioError, load_scenario, shipped_scenario, shipped_scenario_path
from .spg import NumericalFailure
from .trace import read_trace, write_trace

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3
SHIPPED = ("nav", "S2", "S4", "D1", "D2", "D3")


def _resolve_scenario(arg: str) -> Scenario:
    """A path to a JSON file, or the name of a shipped scene."""
    path = Path(arg)
    if path.exists():
        return load_scenario(path)
    if arg in SHIPPED:
        return shipped_scenario(arg)
    raise ScenarioError(f"{arg}: no such scenario file or shipped scene")


def _suite_scenarios(arg: str) -> list[Scenario]:
    path = Path(arg)
    if path.is_dir():
        files = sorted(path.glob("*.json"))
        if not files:
            raise ScenarioError(f"{arg}: no *.json scenario files")
        return [load_scenario(f) for f in files]
    if arg == "shipped":
        return [load_scenario(shipped_scenario_path(n)) for n in SHIPPED]
    return [_resolve_scenario(a) for a in arg.split(",")]


def _csv_list(text: str, cast=str) -> list:
    return [cast(x) for x in text.split(",") if x.strip()]


def _methods(text: str) -> list[str]:
    out = _csv_list(text)
    bad = [m for m in out if m not in METHODS]
    if bad:
        raise ScenarioError(f"unknown method(s) {', '.join(bad)}; expected {', '.join(METHODS)}")
    return out


def cmd_simulate(args) -> int:
    sc = _resolve_scenario(args.scenario)
    if args.horizon is not None:
        sc = sc.with_horizon(args.horizon)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    trace = run_closed_loop(sc, args.method)
    path = write_trace(trace, args.out, include_timing=args.timing)
    s = trace.summary()
    print(f"{path}: reached_goal={s['reached_goal']} collision={s['collision']} "
          f"min_clearance={s['min_clearance']} steps={s['steps']}")
    return EXIT_SOLVER if s["solver_failures"] else EXIT_OK


def cmd_bench(args) -> int:
    report = run_suite(_suite_scenarios(args.suite), _methods(args.methods), _csv_list(args.horizons, int),
                       args.out, include_timing=not args.no_timing)
    print(report.table(), end="")
    return EXIT_OK


def cmd_plot(args) -> int:
    traces = [read_trace(p) for p in args.traces]
    print(emit_plot(traces, args.out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geoprovo", description="VO-constrained NMPC navigation experiments")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sim = sub.add_parser("simulate", help="run one closed-loop simulation")
    sim.add_argument("--scenario", required=True, help="scenario JSON file or shipped scene name")
    sim.add_argument("--method", required=True, choices=METHODS)
    sim.add_argument("--horizon", type=int, default=None)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--timing", action="store_true",
                     help="write wall-clock solve_ms (makes the CSV non-reproducible)")
    sim.set_defaults(func=cmd_simulate)

    bench = sub.add_parser("bench", help="scenario x method x horizon suite")
    bench.add_argument("--suite", required=True,
                       help="directory of scenario files, 'shipped', or comma-separated names")
    bench.add_argument("--methods", required=True, help="comma-separated")
    bench.add_argument("--horizons", required=True, help="comma-separated")
    bench.add_argument("--out", required=True)
    bench.add_argument("--no-timing", action="store_true")
    bench.set_defaults(func=cmd_bench)

    plot = sub.add_parser("plot", help="SVG overlay of saved traces")
    plot.add_argument("--traces", required=True, nargs="+")
    plot.add_argument("--out", required=True)
    plot.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, OracleCapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
