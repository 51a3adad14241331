"""Overlay plots from a results directory: one SVG per (scene, horizon)
with every method that was run.

    python3 scripts/make_figures.py [--results results] [--out results/figures]
"""
import argparse
from collections import defaultdict
from pathlib import Path

from geoprovo.harness import emit_plot
from geoprovo.trace import read_trace


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--results", default="results")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    results = Path(args.results)
    out = Path(args.out) if args.out else results / "figures"
    groups = defaultdict(list)
    for csv_path in sorted(results.glob("*.csv")):
        tr = read_trace(csv_path)
        groups[(tr.scenario.name, tr.horizon)].append(tr)
    for (scene, N), traces in sorted(groups.items()):
        print(emit_plot(traces, out / f"{scene}_N{N}.svg"))


if __name__ == "__main__":
    main()
