"""Double-integrator model, exact zero-order-hold discretisation, and the
condensed (control-only) rollout with its adjoint.

Trajectories are arrays: a state is ``[x, y, vx, vy]``, a control sequence
``U`` has shape (N, 2) and a state trajectory ``X`` has shape (N, 4) holding
steps 1..N.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RobotState:
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(2))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(2))
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.v))):
            raise ValueError("robot state must be finite")

    @classmethod
    def from_array(cls, x) -> "RobotState":
        x = np.asarray(x, dtype=float)
        return cls(x[:2], x[2:4])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.p, self.v])


def _check_dt(dt: float) -> None:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")


def step(x: RobotState, u, dt: float) -> RobotState:
    _check_dt(dt)
    u = np.asarray(u, dtype=float)
    return RobotState(x.p + x.v * dt + u * (0.5 * dt * dt), x.v + u * dt)


def rollout(x0: RobotState, U, dt: float) -> np.ndarray:
    """States at steps 1..N for controls ``U`` (N, 2); returns (N, 4)."""
    _check_dt(dt)
    U = np.asarray(U, dtype=float).reshape(-1, 2)
    v = x0.v + dt * np.cumsum(U, axis=0)
    v_prev = np.vstack([x0.v, v[:-1]])
    p = x0.p + np.cumsum(v_prev * dt + U * (0.5 * dt * dt), axis=0)
    return np.hstack([p, v])


@dataclass(frozen=True)
class BatchLinearization:
    A: tuple
    B: tuple
    dt: float

    @property
    def horizon(self) -> int:
        return len(self.A)


def transition_matrices(dt: float) -> tuple[np.ndarray, np.ndarray]:
    A = np.eye(4)
    A[0, 2] = A[1, 3] = dt
    B = np.zeros((4, 2))
    B[0, 0] = B[1, 1] = 0.5 * dt * dt
    B[2, 0] = B[3, 1] = dt
    return A, B


def linearize(N: int, dt: float) -> BatchLinearization:
    """Per-step Jacobians; constant for the double integrator."""
    _check_dt(dt)
    if N < 1:
        raise ValueError(f"horizon must be >= 1, got {N}")
    A, B = transition_matrices(dt)
    return BatchLinearization(tuple([A] * N), tuple([B] * N), dt)


def adjoint_multiply(omega, lin: BatchLinearization) -> np.ndarray:
    """``B_cal^T omega`` by the reverse recursion, O(N) mat-vec products.

    ``omega`` is (N, 4); the result is (N, 2).
    """
    omega = np.asarray(omega, dtype=float)
    N = lin.horizon
    if omega.shape != (N, 4):
        raise ValueError(f"omega must have shape ({N}, 4), got {omega.shape}")
    z = np.empty((N, 2))
    acc = omega[N - 1].copy()
    z[N - 1] = lin.B[N - 1].T @ acc
    for k in range(N - 2, -1, -1):
        acc = omega[k] + lin.A[k + 1].T @ acc
        z[k] = lin.B[k].T @ acc
    return z


def dense_rollout_operators(lin: BatchLinearization) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``A_cal`` (4N, 4) and ``B_cal`` (4N, 2N). Test oracle only."""
    N = lin.horizon
    A_cal = np.zeros((4 * N, 4))
    B_cal = np.zeros((4 * N, 2 * N))
    prod = np.eye(4)
    for k in range(N):
        prod = lin.A[k] @ prod
        A_cal[4 * k:4 * k + 4] = prod
        for j in range(k + 1):
            block = lin.B[j]
            for i in range(j + 1, k + 1):
                block = lin.A[i] @ block
            B_cal[4 * k:4 * k + 4, 2 * j:2 * j + 2] = block
    return A_cal, B_cal
