"""Augmented Lagrangian outer loop with a spectral projected gradient inner
solver over the control box."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import adjoint_multiply, linearize, rollout
from .geometry import project_box_batch, project_halfplane_batch
from .problem import ConstraintBlock, NMPCProblem, build_blocks, build_cost, control_bounds
from .projectors import ProjectorKind, geopro_ed_batch, geopro_vo_batch
from .spg import NumericalFailure, SPGConfig, spg_minimize

RHO_MAX = 1e8


@dataclass(frozen=True)
class ALSPGConfig:
    beta: float = 20.0
    rho_init: float = 0.1
    eps_tol: float = 1e-2
    N_max: int = 20
    spg: SPGConfig = SPGConfig()
    tau: float = 0.5
    rebuild: bool = True

    def __post_init__(self):
        if not self.beta > 1:
            raise ValueError("beta must exceed 1")
        if not self.rho_init > 0:
            raise ValueError("rho_init must be positive")
        if not self.eps_tol > 0:
            raise ValueError("eps_tol must be positive")
        if self.N_max < 1:
            raise ValueError("N_max must be >= 1")


@dataclass
class ALSPGStats:
    outer_iterations: int = 0
    norm_V: float = np.inf
    converged: bool = False
    inner_iterations: list = field(default_factory=list)
    iteration_ms: list = field(default_factory=list)
    # per outer iteration: {block_id: (rho, lam)} after the update
    rho_history: list = field(default_factory=list)
    rho_ceiling_hit: bool = False


class PackedBlocks:
    """Blocks flattened into arrays so one Lagrangian evaluation projects every
    block with a handful of vectorised calls."""

    def __init__(self, blocks: list[ConstraintBlock]):
        self.blocks = blocks
        n = len(blocks)
        self.rows = np.array([b.step - 1 for b in blocks], dtype=int)
        cols = np.array([b.column for b in blocks], dtype=int)
        self.cols = cols[:, None] + np.arange(2)
        self.lam = np.array([b.lam for b in blocks], dtype=float).reshape(n, 2)
        self.rho = np.array([b.rho for b in blocks], dtype=float)
        self.groups = []
        by_kind: dict = {}
        for j, b in enumerate(blocks):
            by_kind.setdefault(b.projector.kind, []).append(j)
        for kind, idx in by_kind.items():
            specs = [blocks[j].projector for j in idx]
            idx = np.array(idx, dtype=int)
            if kind is ProjectorKind.VO:
                params = (np.array([s.cone.normals for s in specs]), np.array([s.cone.offsets for s in specs]))
            elif kind is ProjectorKind.EUCLIDEAN_DISTANCE:
                params = (
                    np.array([s.disk.center for s in specs]),
                    np.array([s.r_robot + s.disk.radius for s in specs]),
                )
            elif kind is ProjectorKind.STATE_BOX:
                params = (np.array([s.box.lower for s in specs]), np.array([s.box.upper for s in specs]))
            else:
                params = (
                    np.array([s.halfplane.normal for s in specs]),
                    np.array([s.halfplane.offset for s in specs]),
                )
            self.groups.append((kind, idx, params))

    def select(self, X: np.ndarray) -> np.ndarray:
        return X[self.rows[:, None], self.cols]

    def project(self, Y: np.ndarray) -> np.ndarray:
        P = np.empty_like(Y)
        for kind, idx, params in self.groups:
            Yk = Y[idx]
            if kind is ProjectorKind.VO:
                P[idx] = geopro_vo_batch(Yk, *params)
            elif kind is ProjectorKind.EUCLIDEAN_DISTANCE:
                P[idx] = geopro_ed_batch(Yk, *params)
            elif kind is ProjectorKind.STATE_BOX:
                P[idx] = project_box_batch(Yk, *params)
            else:
                P[idx] = project_halfplane_batch(Yk, *params)
        return P

    def distances(self, X: np.ndarray) -> np.ndarray:
        """``V = g - P(g + lam / rho)`` for every block, shape (n, 2)."""
        G = self.select(X)
        return G - self.project(G + self.lam / self.rho[:, None])


def _lagrangian(problem: NMPCProblem, packed: PackedBlocks):
    cost = build_cost(problem)
    lin = linearize(problem.horizon_N, problem.dt)

    def evaluate(U):
        U = U.reshape(-1, 2)
        X = rollout(problem.x0, U, problem.dt)
        value, J_X, J_U = cost(X, U)
        if packed.blocks:
            Y = packed.select(X) + packed.lam / packed.rho[:, None]
            W = Y - packed.project(Y)
            value += 0.5 * float(np.sum(packed.rho * np.sum(W * W, axis=1)))
            np.add.at(J_X, (packed.rows[:, None], packed.cols), packed.rho[:, None] * W)
        return value, adjoint_multiply(J_X, lin) + J_U

    return evaluate


def eval_lagrangian(U, blocks: list[ConstraintBlock], problem: NMPCProblem) -> tuple[float, np.ndarray]:
    U = np.asarray(U, dtype=float).reshape(problem.horizon_N, 2)
    return _lagrangian(problem, PackedBlocks(blocks))(U)


def distance_function(U, block: ConstraintBlock, problem: NMPCProblem) -> np.ndarray:
    X = rollout(problem.x0, np.asarray(U, dtype=float).reshape(-1, 2), problem.dt)
    return PackedBlocks([block]).distances(X)[0]


def alspg_solve(
    problem: NMPCProblem,
    U_init,
    cfg: ALSPGConfig = ALSPGConfig(),
    avoidance: str = "vo",
    sides: Optional[dict] = None,
) -> tuple[np.ndarray, ALSPGStats]:
    """Solve the constrained receding-horizon problem from ``U_init`` (N, 2).

    Block geometry is rebuilt from the latest iterate once per outer
    iteration; multipliers and penalties carry over by block id.
    """
    N = problem.horizon_N
    U = np.asarray(U_init, dtype=float).reshape(N, 2)
    if not np.all(np.isfinite(U)):
        raise NumericalFailure("non-finite initial controls", iterate=U)
    lo, hi = control_bounds(problem)
    project_u = lambda Z: np.minimum(np.maximum(Z, lo), hi)  # noqa: E731
    U = project_u(U)

    X = rollout(problem.x0, U, problem.dt)
    blocks = build_blocks(problem, X, avoidance, sides, cfg.rho_init)
    packed = PackedBlocks(blocks)
    v_prev = np.linalg.norm(packed.distances(X), axis=1) if blocks else np.zeros(0)

    stats = ALSPGStats()
    for _ in range(cfg.N_max):
        t0 = time.perf_counter()
        U, inner = spg_minimize(_lagrangian(problem, packed), project_u, U, cfg.spg)
        X = rollout(problem.x0, U, problem.dt)
        stats.outer_iterations += 1
        stats.inner_iterations.append(inner.iterations)

        if not blocks:
            stats.norm_V = 0.0
            stats.converged = True
            stats.iteration_ms.append(1e3 * (time.perf_counter() - t0))
            break

        V = packed.distances(X)
        v_new = np.linalg.norm(V, axis=1)
        for j, b in enumerate(blocks):
            b.lam = b.rho * V[j] + b.lam
            if v_new[j] > cfg.tau * v_prev[j]:
                if b.rho * cfg.beta <= RHO_MAX:
                    b.rho *= cfg.beta
                else:
                    stats.rho_ceiling_hit = True
        stats.rho_history.append({b.block_id: (b.rho, b.lam.copy()) for b in blocks})
        v_prev = v_new
        stats.norm_V = float(np.linalg.norm(V))
        stats.iteration_ms.append(1e3 * (time.perf_counter() - t0))
        if stats.norm_V <= cfg.eps_tol:
            stats.converged = True
            break

        if cfg.rebuild:
            carried = {b.block_id: (b.lam, b.rho) for b in blocks}
            blocks = build_blocks(problem, X, avoidance, sides, cfg.rho_init)
            for b in blocks:
                b.lam, b.rho = carried[b.block_id]
        packed = PackedBlocks(blocks)
    return U, stats
