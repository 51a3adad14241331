"""Run every shipped scene with each controller at N=2 and N=6 and write
traces plus a timing/safety table to ``results/``.

    python3 scripts/run_scenes.py [--out results] [--methods geopro-vo,geopro-ed,reactive-vo]
"""
import argparse

from geoprovo.harness import run_suite
from geoprovo.scenario import shipped_scenario

SCENES = ("nav", "S2", "S4", "D1", "D2", "D3")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--methods", default="geopro-vo,geopro-ed,reactive-vo")
    ap.add_argument("--horizons", default="2,6")
    args = ap.parse_args()
    report = run_suite(
        [shipped_scenario(n) for n in SCENES],
        args.methods.split(","),
        [int(h) for h in args.horizons.split(",")],
        args.out,
    )
    print(report.table(), end="")


if __name__ == "__main__":
    main()
