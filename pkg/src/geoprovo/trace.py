"""Closed-loop simulation logs, summary statistics and CSV persistence."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .scenario import Scenario, scenario_from_dict

BASE_COLUMNS = ["t", "x", "y", "vx", "vy", "ax", "ay", "solve_ms", "outer_iters", "norm_V"]


@dataclass
class TraceRow:
    """State reached at time ``t`` after applying ``u`` during the preceding step."""

    t: float
    p: np.ndarray
    v: np.ndarray
    u: np.ndarray
    solve_ms: float
    clearances: np.ndarray
    outer_iters: int = 0
    norm_V: float = 0.0
    failed: bool = False


def timing_stats(values) -> dict:
    if len(values) == 0:
        return {"max": None, "min": None, "median": None, "avg": None}
    arr = np.asarray(values, dtype=float)
    return {
        "max": float(arr.max()),
        "min": float(arr.min()),
        "median": float(np.median(arr)),
        "avg": float(arr.mean()),
    }


@dataclass
class SimTrace:
    scenario: Scenario
    method: str
    rows: list = field(default_factory=list)
    reached_goal: bool = False
    fallback_steps: int = 0

    @property
    def horizon(self) -> int:
        return self.scenario.params.N

    @property
    def min_clearance(self) -> float:
        if not self.rows or not self.scenario.obstacles:
            return float("inf")
        return float(min(np.min(r.clearances) for r in self.rows))

    @property
    def collision(self) -> bool:
        return self.min_clearance < 0.0

    def collision_rows(self) -> list:
        return [r for r in self.rows if len(r.clearances) and np.min(r.clearances) < 0.0]

    @property
    def time_to_goal(self) -> Optional[float]:
        return self.rows[-1].t if (self.reached_goal and self.rows) else (0.0 if self.reached_goal else None)

    def summary(self) -> dict:
        return {
            "scenario": self.scenario.name,
            "method": self.method,
            "horizon": self.horizon,
            "steps": len(self.rows),
            "reached_goal": self.reached_goal,
            "min_clearance": self.min_clearance if np.isfinite(self.min_clearance) else None,
            "collision": self.collision,
            "time_to_goal": self.time_to_goal,
            "solver_failures": sum(r.failed for r in self.rows),
            "fallback_steps": self.fallback_steps,
            "solve_ms": timing_stats([r.solve_ms for r in self.rows]),
        }


def _fmt(x) -> str:
    return repr(float(x))


def trace_to_csv(trace: SimTrace, include_timing: bool = True) -> str:
    n_obs = len(trace.scenario.obstacles)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BASE_COLUMNS + [f"clearance_{i + 1}" for i in range(n_obs)])
    for r in trace.rows:
        writer.writerow(
            [_fmt(r.t), _fmt(r.p[0]), _fmt(r.p[1]), _fmt(r.v[0]), _fmt(r.v[1]), _fmt(r.u[0]), _fmt(r.u[1]),
             _fmt(r.solve_ms) if include_timing else "", str(int(r.outer_iters)), _fmt(r.norm_V)]
            + [_fmt(c) for c in r.clearances]
        )
    return buf.getvalue()


def write_trace(trace: SimTrace, out_dir, include_timing: bool = True) -> Path:
    """Write ``<name>_<method>_N<h>.csv`` plus a JSON sidecar with the scenario
    and summary (needed to redraw obstacles when plotting)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{trace.scenario.name}_{trace.method}_N{trace.horizon}"
    csv_path = out_dir / f"{stem}.csv"
    csv_path.write_text(trace_to_csv(trace, include_timing), encoding="utf-8")
    summary = trace.summary()
    if not include_timing:
        summary["solve_ms"] = timing_stats([])
    meta = {
        "scenario": trace.scenario.to_dict(),
        "method": trace.method,
        "summary": summary,
        "reached_goal": trace.reached_goal,
        "fallback_steps": trace.fallback_steps,
    }
    (out_dir / f"{stem}.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path


def read_trace(csv_path) -> SimTrace:
    """Inverse of ``write_trace``; the JSON sidecar must sit next to the CSV."""
    csv_path = Path(csv_path)
    meta = json.loads(csv_path.with_suffix(".json").read_text(encoding="utf-8"))
    scenario = scenario_from_dict(meta["scenario"])
    trace = SimTrace(scenario, meta["method"], reached_goal=meta["reached_goal"],
                     fallback_steps=meta.get("fallback_steps", 0))
    with csv_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        n_obs = len(scenario.obstacles)
        for rec in reader:
            trace.rows.append(
                TraceRow(
                    t=float(rec["t"]),
                    p=np.array([float(rec["x"]), float(rec["y"])]),
                    v=np.array([float(rec["vx"]), float(rec["vy"])]),
                    u=np.array([float(rec["ax"]), float(rec["ay"])]),
                    solve_ms=float(rec["solve_ms"]) if rec["solve_ms"] else float("nan"),
                    clearances=np.array([float(rec[f"clearance_{i + 1}"]) for i in range(n_obs)]),
                    outer_iters=int(rec["outer_iters"]),
                    norm_V=float(rec["norm_V"]),
                )
            )
    return trace
