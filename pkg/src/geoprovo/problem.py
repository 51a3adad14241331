"""Receding-horizon problem assembly: the goal-tracking cost and the
per-(obstacle, step) constraint blocks fed to the augmented Lagrangian."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import RobotState
from .geometry import Box2, Disk, as_vec2
from .projectors import ProjectorKind, ProjectorSpec, build_vo_cone, flee_hyperplane

# default robot and solver limits
V_MAX = 0.4
A_MAX = 1.0
ROBOT_RADIUS = 0.1
SAFE_MARGIN = 0.03
DT = 0.05
HORIZON = 6


@dataclass(frozen=True)
class Obstacle:
    disk: Disk
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "velocity", as_vec2(self.velocity))

    @property
    def dynamic(self) -> bool:
        return bool(np.any(self.velocity != 0.0))

    def center_at(self, t: float) -> np.ndarray:
        return self.disk.center + t * self.velocity


@dataclass(frozen=True)
class NMPCProblem:
    x0: RobotState
    goal: np.ndarray
    horizon_N: int = HORIZON
    dt: float = DT
    q_p: float = 10.0
    r_u: float = 0.1
    q_v: float = 1.0
    obstacles: tuple = ()
    v_box: Box2 = Box2.symmetric(V_MAX)
    a_box: Box2 = Box2.symmetric(A_MAX)
    margin: float = SAFE_MARGIN
    robot_radius: float = ROBOT_RADIUS

    def __post_init__(self):
        object.__setattr__(self, "goal", as_vec2(self.goal))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if self.horizon_N < 1:
            raise ValueError("horizon_N must be >= 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not (self.q_p > 0 and self.r_u > 0 and self.q_v >= 0):
            raise ValueError("cost weights must be positive (q_v non-negative)")

    def r_sum(self, obstacle: Obstacle) -> float:
        return self.robot_radius + obstacle.disk.radius + self.margin


@dataclass
class ConstraintBlock:
    """One 2-D constraint ``g(X) in C`` for a single horizon step.

    ``field`` selects the velocity (``"v"``) or position (``"p"``) of state
    ``step`` (1-based), so the selector Jacobian is a constant 0/1 matrix.
    """

    projector: ProjectorSpec
    step: int
    field: str
    lam: np.ndarray
    rho: float
    block_id: tuple

    @property
    def column(self) -> int:
        return 2 if self.field == "v" else 0

    def select(self, X: np.ndarray) -> np.ndarray:
        c = self.column
        return X[self.step - 1, c:c + 2]


def build_cost(problem: NMPCProblem):
    """Quadratic goal tracking, velocity damping and control effort.

    Returns ``cost(X, U) -> (value, J_X, J_U)`` with ``J_X`` shaped like ``X``
    (N, 4) and ``J_U`` like ``U`` (N, 2).
    """
    goal, q_p, q_v, r_u = problem.goal, problem.q_p, problem.q_v, problem.r_u

    def cost(X, U):
        err = X[:, :2] - goal
        vel = X[:, 2:]
        value = q_p * float(np.sum(err * err)) + q_v * float(np.sum(vel * vel)) + r_u * float(np.sum(U * U))
        J_X = np.empty_like(X)
        J_X[:, :2] = 2.0 * q_p * err
        J_X[:, 2:] = 2.0 * q_v * vel
        return value, J_X, 2.0 * r_u * U

    return cost


def predicted_center(obstacle: Obstacle, k: int, dt: float) -> np.ndarray:
    """Constant-velocity prediction ``k`` steps ahead."""
    return obstacle.disk.center + (k * dt) * obstacle.velocity


def build_blocks(
    problem: NMPCProblem,
    reference: np.ndarray,
    avoidance: str = "vo",
    sides: Optional[dict] = None,
    rho_init: float = 0.1,
) -> list[ConstraintBlock]:
    """Constraint blocks linearised about the reference trajectory (N, 4).

    ``avoidance`` is ``"vo"`` (velocity cones) or ``"ed"`` (clearance disks).
    ``sides`` maps ``(i, k)`` to 1 or 2 and pins the VO block to that single
    cone edge halfplane, which is how the enumeration oracle fixes disjuncts.
    """
    if avoidance not in ("vo", "ed"):
        raise ValueError(f"unknown avoidance kind {avoidance!r}")
    N = problem.horizon_N
    if reference.shape != (N, 4):
        raise ValueError(f"reference must have shape ({N}, 4), got {reference.shape}")

    blocks = []
    for i, obs in enumerate(problem.obstacles):
        r_sum = problem.r_sum(obs)
        for k in range(1, N + 1):
            center = predicted_center(obs, k, problem.dt)
            p_robot = reference[k - 1, :2]
            if avoidance == "ed":
                spec = ProjectorSpec.ed(Disk(center, obs.disk.radius + problem.margin), problem.robot_radius)
                field_ = "p"
            else:
                cone = build_vo_cone(p_robot, center, obs.velocity, r_sum)
                if cone.degenerate:
                    spec = ProjectorSpec.half(flee_hyperplane(p_robot, center, obs.velocity))
                elif sides is not None:
                    spec = ProjectorSpec.half(cone.hyperplanes[sides[(i, k)] - 1])
                else:
                    spec = ProjectorSpec.vo(cone)
                field_ = "v"
            blocks.append(ConstraintBlock(spec, k, field_, np.zeros(2), rho_init, ("obs", i, k)))
    vbox = ProjectorSpec.state_box(problem.v_box)
    for k in range(1, N + 1):
        blocks.append(ConstraintBlock(vbox, k, "v", np.zeros(2), rho_init, ("vbox", k)))
    return blocks


def control_bounds(problem: NMPCProblem) -> tuple[np.ndarray, np.ndarray]:
    """Per-step control box (N, 2).

    The first control is additionally limited so that the first predicted
    velocity stays inside ``v_box``; since ``v_1 = v_0 + dt * u_0`` that set
    is itself a box in ``u_0``.
    """
    N, dt = problem.horizon_N, problem.dt
    lo = np.tile(problem.a_box.lower, (N, 1))
    hi = np.tile(problem.a_box.upper, (N, 1))
    v0 = problem.x0.v
    lo[0] = np.clip((problem.v_box.lower - v0) / dt, problem.a_box.lower, problem.a_box.upper)
    hi[0] = np.clip((problem.v_box.upper - v0) / dt, problem.a_box.lower, problem.a_box.upper)
    return lo, hi
