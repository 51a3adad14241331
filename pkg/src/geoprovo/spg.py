"""Spectral projected gradient (Barzilai-Borwein steps, nonmonotone line search)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class NumericalFailure(RuntimeError):
    def __init__(self, message: str, iterate: np.ndarray | None = None):
        super().__init__(message)
        self.iterate = iterate


@dataclass(frozen=True)
class SPGConfig:
    max_iters: int = 100
    alpha_min: float = 1e-10
    alpha_max: float = 1e10
    memory_M: int = 10
    gamma: float = 1e-4
    sigma1: float = 0.1
    sigma2: float = 0.9
    tol: float = 1e-6
    max_backtracks: int = 60

    def __post_init__(self):
        if not 0 < self.alpha_min < self.alpha_max:
            raise ValueError("need 0 < alpha_min < alpha_max")
        if self.memory_M < 1:
            raise ValueError("memory_M must be >= 1")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.sigma1 < self.sigma2 < 1:
            raise ValueError("need 0 < sigma1 < sigma2 < 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")


@dataclass
class SPGStats:
    iterations: int = 0
    evaluations: int = 0
    stationarity: float = np.inf
    value: float = np.inf
    converged: bool = False
    # per accepted step: (f_new, f_ref, step length lam, directional derivative, alpha)
    history: list = field(default_factory=list)


def spg_minimize(
    objective: Callable[[np.ndarray], tuple[float, np.ndarray]],
    project: Callable[[np.ndarray], np.ndarray],
    U_init: np.ndarray,
    cfg: SPGConfig = SPGConfig(),
) -> tuple[np.ndarray, SPGStats]:
    stats = SPGStats()

    def evaluate(x):
        f, g = objective(x)
        stats.evaluations += 1
        if not (np.isfinite(f) and np.all(np.isfinite(g))):
            raise NumericalFailure("non-finite objective or gradient", iterate=x.copy())
        return float(f), np.asarray(g, dtype=float)

    x = project(np.array(U_init, dtype=float))
    f, g = evaluate(x)
    best_x, best_f, best_g = x, f, g
    recent = [f]

    gnorm = np.max(np.abs(g)) if g.size else 0.0
    alpha = 1.0 / gnorm if gnorm > 0 else cfg.alpha_max
    alpha = min(cfg.alpha_max, max(cfg.alpha_min, alpha))

    for it in range(cfg.max_iters + 1):
        pg = project(x - g) - x
        stats.stationarity = float(np.max(np.abs(pg))) if pg.size else 0.0
        if stats.stationarity <= cfg.tol:
            stats.converged = True
            break
        if it == cfg.max_iters:
            break

        d = project(x - alpha * g) - x
        slope = float(np.sum(g * d))
        f_ref = max(recent[-cfg.memory_M:])
        lam = 1.0
        for _ in range(cfg.max_backtracks):
            x_new = project(x + lam * d)
            f_new, g_new = evaluate(x_new)
            if f_new <= f_ref + cfg.gamma * lam * slope:
                break
            denom = 2.0 * (f_new - f - lam * slope)
            lam_q = -slope * lam * lam / denom if denom > 0 else -1.0
            if cfg.sigma1 <= lam_q <= cfg.sigma2 * lam:
                lam = lam_q
            else:
                lam *= 0.5
        else:
            # no acceptable step along a descent direction: we are at working precision
            break

        stats.history.append((f_new, f_ref, lam, slope, alpha))
        s = x_new - x
        y = g_new - g
        sy = float(np.sum(s * y))
        if sy <= 0:
            alpha = cfg.alpha_max
        else:
            alpha = min(cfg.alpha_max, max(cfg.alpha_min, float(np.sum(s * s)) / sy))
        x, f, g = x_new, f_new, g_new
        recent.append(f)
        stats.iterations += 1
        if f < best_f:
            best_x, best_f, best_g = x, f, g

    stats.value = best_f
    if best_x is not x:
        pg = project(best_x - best_g) - best_x
        stats.stationarity = float(np.max(np.abs(pg))) if pg.size else 0.0
    return best_x, stats
