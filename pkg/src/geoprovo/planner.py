"""Receding-horizon control: one solve per control step, first control
applied, warm start shifted, obstacles advanced at constant velocity."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .alspg import ALSPGConfig, ALSPGStats, alspg_solve
from .baselines import minlp_enumerate, reactive_vo_step
from .dynamics import RobotState, rollout, step
from .geometry import Box2, Disk
from .problem import NMPCProblem, Obstacle, predicted_center
from .scenario import Scenario
from .spg import NumericalFailure
from .trace import SimTrace, TraceRow

METHODS = ("geopro-vo", "geopro-ed", "reactive-vo", "minlp-oracle")


@dataclass
class PlanStepResult:
    applied_u: np.ndarray
    predicted_traj: np.ndarray
    solver_stats: object
    clearances: np.ndarray
    failed: bool = False


@dataclass
class StepOutcome:
    u: np.ndarray
    outer_iters: int = 0
    norm_V: float = 0.0
    failed: bool = False
    fallback: bool = False


def braking_control(problem: NMPCProblem) -> np.ndarray:
    return np.clip(-problem.x0.v / problem.dt, problem.a_box.lower, problem.a_box.upper)


def shift_warm_start(U: np.ndarray) -> np.ndarray:
    return np.vstack([U[1:], U[-1:]])


def predicted_clearances(problem: NMPCProblem, X: np.ndarray) -> np.ndarray:
    """Per obstacle, the smallest centre distance minus radii over the horizon."""
    out = np.empty(len(problem.obstacles))
    for i, obs in enumerate(problem.obstacles):
        d = [
            np.hypot(*(X[k - 1, :2] - predicted_center(obs, k, problem.dt)))
            for k in range(1, problem.horizon_N + 1)
        ]
        out[i] = min(d) - problem.robot_radius - obs.disk.radius
    return out


def plan_step(
    problem: NMPCProblem,
    U_warm,
    cfg: ALSPGConfig = ALSPGConfig(),
    avoidance: str = "vo",
) -> tuple[PlanStepResult, np.ndarray]:
    U_warm = np.asarray(U_warm, dtype=float).reshape(problem.horizon_N, 2)
    failed = False
    try:
        U, stats = alspg_solve(problem, U_warm, cfg, avoidance=avoidance)
        u = np.clip(U[0], problem.a_box.lower, problem.a_box.upper)
    except NumericalFailure as exc:
        stats = ALSPGStats()
        stats.failure = str(exc)
        failed = True
        u = braking_control(problem)
        U = np.tile(u, (problem.horizon_N, 1))
    X = rollout(problem.x0, U, problem.dt)
    result = PlanStepResult(u, X, stats, predicted_clearances(problem, X), failed)
    return result, shift_warm_start(U)


class NMPCController:
    """ALSPG receding-horizon controller with VO or Euclidean-distance blocks."""

    def __init__(self, avoidance: str = "vo", cfg: ALSPGConfig = ALSPGConfig()):
        self.avoidance = avoidance
        self.cfg = cfg
        self.U_warm: Optional[np.ndarray] = None

    def __call__(self, problem: NMPCProblem) -> StepOutcome:
        if self.U_warm is None or self.U_warm.shape[0] != problem.horizon_N:
            self.U_warm = np.zeros((problem.horizon_N, 2))
        res, self.U_warm = plan_step(problem, self.U_warm, self.cfg, self.avoidance)
        stats = res.solver_stats
        return StepOutcome(res.applied_u, stats.outer_iterations, stats.norm_V, res.failed)


class ReactiveVOController:
    """Velocity-space VO: the chosen velocity is reached in one step, whatever
    acceleration that takes."""

    def __init__(self, grid_n: int = 41):
        self.grid_n = grid_n

    def __call__(self, problem: NMPCProblem) -> StepOutcome:
        obstacles = [(o.disk.center, o.velocity, o.disk.radius) for o in problem.obstacles]
        v_new, flagged = reactive_vo_step(
            problem.x0.p, problem.x0.v, problem.goal, obstacles, float(problem.v_box.upper[0]),
            self.grid_n, problem.robot_radius, problem.margin, problem.dt,
        )
        return StepOutcome((v_new - problem.x0.v) / problem.dt, fallback=flagged)


class OracleController:
    """Receding horizon driven by the enumeration oracle (desk-scale only)."""

    def __init__(self, cfg: ALSPGConfig = ALSPGConfig(), max_pairs: Optional[int] = 8):
        self.cfg = cfg
        self.max_pairs = max_pairs
        self.U_warm: Optional[np.ndarray] = None

    def __call__(self, problem: NMPCProblem) -> StepOutcome:
        if self.U_warm is None or self.U_warm.shape[0] != problem.horizon_N:
            self.U_warm = np.zeros((problem.horizon_N, 2))
        res = minlp_enumerate(problem, self.cfg, self.U_warm, self.max_pairs)
        if res.U_opt is None:
            u = braking_control(problem)
            self.U_warm = np.tile(u, (problem.horizon_N, 1))
            return StepOutcome(u, failed=True)
        self.U_warm = shift_warm_start(res.U_opt)
        u = np.clip(res.U_opt[0], problem.a_box.lower, problem.a_box.upper)
        return StepOutcome(u, outer_iters=res.feasible_count)


def make_controller(method: str, cfg: ALSPGConfig = ALSPGConfig()):
    if method == "geopro-vo":
        return NMPCController("vo", cfg)
    if method == "geopro-ed":
        return NMPCController("ed", cfg)
    if method == "reactive-vo":
        return ReactiveVOController()
    if method == "minlp-oracle":
        return OracleController(cfg)
    raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")


def problem_at(scenario: Scenario, state: RobotState, t: float, weights: dict | None = None) -> NMPCProblem:
    prm = scenario.params
    obstacles = tuple(
        Obstacle(Disk(np.asarray(o.center) + t * np.asarray(o.velocity), o.radius), o.velocity)
        for o in scenario.obstacles
    )
    return NMPCProblem(
        x0=state,
        goal=scenario.robot.goal,
        horizon_N=prm.N,
        dt=prm.dt,
        **(weights or {}),
        obstacles=obstacles,
        v_box=Box2.symmetric(prm.v_max),
        a_box=Box2.symmetric(prm.a_max),
        margin=prm.d_s,
        robot_radius=scenario.robot.r,
    )


def clearances_at(scenario: Scenario, p: np.ndarray, t: float) -> np.ndarray:
    out = np.empty(len(scenario.obstacles))
    for i, o in enumerate(scenario.obstacles):
        center = np.asarray(o.center) + t * np.asarray(o.velocity)
        out[i] = np.hypot(*(p - center)) - scenario.robot.r - o.radius
    return out


def run_closed_loop(
    scenario: Scenario, method, cfg: ALSPGConfig = ALSPGConfig(), weights: dict | None = None
) -> SimTrace:
    """Simulate until the goal is within ``goal_tol`` or ``max_time`` elapses.

    ``method`` is a name from :data:`METHODS` or a controller callable.
    Collisions are recorded in the trace, never raised.
    """
    controller = make_controller(method, cfg) if isinstance(method, str) else method
    name = method if isinstance(method, str) else type(method).__name__
    prm = scenario.params
    goal = np.asarray(scenario.robot.goal, dtype=float)
    state = RobotState(scenario.robot.start, (0.0, 0.0))
    trace = SimTrace(scenario, name)
    if np.hypot(*(state.p - goal)) <= prm.goal_tol:
        trace.reached_goal = True
        return trace

    n_steps = int(np.floor(prm.max_time / prm.dt + 1e-9))
    for j in range(n_steps):
        t = j * prm.dt
        problem = problem_at(scenario, state, t, weights)
        t0 = time.perf_counter()
        out = controller(problem)
        solve_ms = 1e3 * (time.perf_counter() - t0)
        state = step(state, out.u, prm.dt)
        t_next = (j + 1) * prm.dt
        trace.rows.append(
            TraceRow(t_next, state.p, state.v, np.asarray(out.u, dtype=float), solve_ms,
                     clearances_at(scenario, state.p, t_next), out.outer_iters, out.norm_V, out.failed)
        )
        trace.fallback_steps += int(out.fallback)
        if np.hypot(*(state.p - goal)) <= prm.goal_tol:
            trace.reached_goal = True
            break
    return trace
