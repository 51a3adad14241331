"""Compare ALSPG against the enumeration oracle on random single-obstacle
problems at N=2 and print the cost gap and wall time of each.

    python3 scripts/oracle_gap.py [--trials 20] [--seed 7]
"""
import argparse
import time

import numpy as np

from geoprovo.alspg import ALSPGConfig, alspg_solve
from geoprovo.baselines import minlp_enumerate
from geoprovo.dynamics import RobotState, rollout
from geoprovo.geometry import Box2, Disk
from geoprovo.problem import NMPCProblem, Obstacle, build_cost
from geoprovo.spg import SPGConfig


def instance(rng):
    p = rng.uniform(0, 1, 2)
    goal = p + rng.uniform(0.6, 1.2) * np.array([1.0, 0.0]) + rng.normal(0, 0.1, 2)
    v = rng.uniform(-0.2, 0.4, 2) * np.array([1.0, 0.5])
    c = p + rng.uniform(0.3, 0.6) * np.array([1.0, 0.0]) + rng.normal(0, 0.05, 2)
    vo = rng.uniform(-0.3, 0.1, 2) * np.array([1.0, 0.3])
    return NMPCProblem(RobotState(p, v), goal, horizon_N=2, dt=0.1, a_box=Box2.symmetric(2.0),
                       obstacles=(Obstacle(Disk(c, 0.1), vo),))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    cfg = ALSPGConfig(eps_tol=1e-6, N_max=25, spg=SPGConfig(max_iters=300, tol=1e-9))
    rng = np.random.default_rng(args.seed)
    print(f"{'#':>3} {'alspg':>10} {'oracle':>10} {'gap%':>7} {'feas':>5} {'al_ms':>8} {'or_ms':>9}")
    for t in range(args.trials):
        pr = instance(rng)
        t0 = time.perf_counter()
        U, st = alspg_solve(pr, np.zeros((2, 2)), cfg)
        t1 = time.perf_counter()
        res = minlp_enumerate(pr, cfg)
        t2 = time.perf_counter()
        c_al = build_cost(pr)(rollout(pr.x0, U, pr.dt), U)[0]
        gap = 100 * (c_al - res.cost) / res.cost if np.isfinite(res.cost) else float("nan")
        print(f"{t:>3} {c_al:>10.5f} {res.cost:>10.5f} {gap:>7.3f} {res.feasible_count:>5} "
              f"{1e3 * (t1 - t0):>8.1f} {1e3 * (t2 - t1):>9.1f}")


if __name__ == "__main__":
    main()
