"""Comparison methods: the reactive velocity-obstacle controller and an
exhaustive enumeration oracle for the disjunctive (big-M) VO formulation."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .alspg import ALSPGConfig, alspg_solve
from .dynamics import rollout
from .problem import NMPCProblem, build_cost, predicted_center
from .projectors import build_vo_cone, flee_hyperplane

BIG_M = 1e5


class OracleCapError(ValueError):
    """Enumeration would exceed the configured number of (obstacle, step) pairs."""


class OracleTimeout(RuntimeError):
    def __init__(self, elapsed: float, evaluated: int, total: int):
        super().__init__(f"oracle stopped after {elapsed:.3f} s ({evaluated}/{total} assignments)")
        self.elapsed = elapsed
        self.evaluated = evaluated
        self.total = total


def _cone_constraints(p_robot, obstacles, r_sums) -> tuple[np.ndarray, np.ndarray]:
    """Stack every obstacle's constraint rows as (n, 2, 2) normals and (n, 2)
    offsets.  A degenerate cone contributes its flee halfplane twice."""
    normals, offsets = [], []
    for (center, velocity), r_sum in zip(obstacles, r_sums):
        cone = build_vo_cone(p_robot, center, velocity, r_sum)
        if cone.degenerate:
            h = flee_hyperplane(p_robot, center, velocity)
            normals.append(np.vstack([h.normal, h.normal]))
            offsets.append(np.array([h.offset, h.offset]))
        else:
            normals.append(cone.normals)
            offsets.append(cone.offsets)
    return np.array(normals).reshape(-1, 2, 2), np.array(offsets).reshape(-1, 2)


def preferred_velocity(p, goal, v_max: float, dt: float) -> np.ndarray:
    to_goal = np.asarray(goal, dtype=float) - np.asarray(p, dtype=float)
    dist = np.hypot(*to_goal)
    if dist == 0.0:
        return np.zeros(2)
    speed = min(v_max, dist / dt)
    return np.clip(to_goal / dist * speed, -v_max, v_max)


def reactive_vo_step(
    p,
    v,
    goal,
    obstacles,
    v_max: float,
    grid_n: int = 41,
    r_robot: float = 0.1,
    margin: float = 0.03,
    dt: float = 0.05,
) -> tuple[np.ndarray, bool]:
    """Pick the lattice velocity closest to the preferred one outside every VO.

    ``obstacles`` is a sequence of ``(center, velocity, radius)``.  Returns the
    new velocity and a flag that is true when no lattice point was safe and
    the least-unsafe candidate was taken instead.
    """
    if grid_n < 3 or grid_n % 2 == 0:
        raise ValueError("grid_n must be odd and >= 3")
    v_pref = preferred_velocity(p, goal, v_max, dt)
    axis = np.linspace(-v_max, v_max, grid_n)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    cand = np.column_stack([gx.ravel(), gy.ravel()])
    if len(obstacles) == 0:
        return cand[np.argmin(np.sum((cand - v_pref) ** 2, axis=1))], False

    normals, offsets = _cone_constraints(
        p, [(np.asarray(c, float), np.asarray(w, float)) for c, w, _ in obstacles],
        [r_robot + rad + margin for _, _, rad in obstacles],
    )
    # residuals (n_cand, n_obs, 2); margin per obstacle is the larger residual
    s = np.einsum("omj,cj->com", normals, cand) - offsets[None]
    worst = s.max(axis=2).min(axis=1)
    safe = worst >= 0.0
    if np.any(safe):
        d2 = np.where(safe, np.sum((cand - v_pref) ** 2, axis=1), np.inf)
        return cand[np.argmin(d2)], False
    return cand[np.argmax(worst)], True


@dataclass
class OracleResult:
    U_opt: Optional[np.ndarray]
    cost: float
    feasible_count: int
    assignments: int
    best_assignment: Optional[tuple]


def minlp_enumerate(
    problem: NMPCProblem,
    cfg: ALSPGConfig = ALSPGConfig(),
    U_init=None,
    max_pairs: Optional[int] = 8,
    deadline: Optional[float] = None,
) -> OracleResult:
    """Enumerate every disjunct choice of the VO big-M formulation.

    Each (obstacle, step) pair enforces one cone edge halfplane; every
    assignment is solved with the same augmented Lagrangian machinery and the
    cheapest one whose final residual meets ``cfg.eps_tol`` wins (ties go to
    the lexicographically first assignment).  ``deadline`` is a wall-clock
    budget in seconds; exceeding it raises :class:`OracleTimeout`.
    """
    N = problem.horizon_N
    pairs = [(i, k) for i in range(len(problem.obstacles)) for k in range(1, N + 1)]
    if max_pairs is not None and len(pairs) > max_pairs:
        raise OracleCapError(
            f"{len(pairs)} (obstacle, step) pairs exceed the enumeration cap of {max_pairs}"
        )
    U0 = np.zeros((N, 2)) if U_init is None else np.asarray(U_init, dtype=float).reshape(N, 2)
    cost = build_cost(problem)
    total = 2 ** len(pairs)
    start = time.perf_counter()

    best = OracleResult(None, np.inf, 0, 0, None)
    for choice in itertools.product((1, 2), repeat=len(pairs)):
        if deadline is not None and time.perf_counter() - start > deadline:
            raise OracleTimeout(time.perf_counter() - start, best.assignments, total)
        sides = dict(zip(pairs, choice))
        U, stats = alspg_solve(problem, U0, cfg, avoidance="vo", sides=sides)
        best.assignments += 1
        if stats.norm_V > cfg.eps_tol:
            continue
        best.feasible_count += 1
        value = cost(rollout(problem.x0, U, problem.dt), U)[0]
        if value < best.cost:
            best.U_opt, best.cost, best.best_assignment = U, value, choice
    if deadline is not None and time.perf_counter() - start > deadline:
        raise OracleTimeout(time.perf_counter() - start, best.assignments, total)
    return best


def format_big_m(problem: NMPCProblem, reference: np.ndarray, G: float = BIG_M) -> str:
    """Human-readable big-M disjunctive constraints at the given reference."""
    lines = [f"VO-NMPC big-M form, G = {G:g}, N = {problem.horizon_N}"]
    for i, obs in enumerate(problem.obstacles):
        for k in range(1, problem.horizon_N + 1):
            center = predicted_center(obs, k, problem.dt)
            cone = build_vo_cone(reference[k - 1, :2], center, obs.velocity, problem.r_sum(obs))
            if cone.degenerate:
                lines.append(f"  obstacle {i}, step {k}: degenerate cone (robot inside inflated disk)")
                continue
            for m in range(2):
                n, c = cone.normals[m], cone.offsets[m]
                lines.append(
                    f"  {c:+.6f} - ({n[0]:+.6f} vx_{k} {n[1]:+.6f} vy_{k}) <= {G:g} (1 - z[{i},{k},{m + 1}])"
                )
            lines.append(f"  z[{i},{k},1] + z[{i},{k},2] >= 1")
    return "\n".join(lines)


def ed_nmpc_method(cfg: ALSPGConfig = ALSPGConfig()):
    """The Euclidean-distance NMPC controller (same pipeline, position blocks)."""
    from .planner import NMPCController

    return NMPCController(avoidance="ed", cfg=cfg)
