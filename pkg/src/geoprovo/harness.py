"""Batch runs over scenario x method x horizon, summary tables and SVG plots."""
from __future__ import annotations

import json
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .alspg import ALSPGConfig
from .planner import run_closed_loop
from .scenario import Scenario
from .trace import SimTrace, write_trace


@dataclass
class RunRecord:
    scenario: str
    method: str
    horizon: int
    summary: dict | None = None
    csv_path: str | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class SuiteReport:
    runs: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.runs)

    def find(self, scenario: str, method: str, horizon: int) -> RunRecord:
        for r in self.runs:
            if (r.scenario, r.method, r.horizon) == (scenario, method, horizon):
                return r
        raise KeyError((scenario, method, horizon))

    def to_dict(self) -> dict:
        return {"runs": [vars(r) for r in self.runs]}

    def table(self) -> str:
        head = (f"{'scenario':<10}{'method':<14}{'N':>3}  {'goal':<5}{'collide':<8}{'min_clr':>9}"
                f"{'max_ms':>10}{'min_ms':>10}{'med_ms':>10}{'avg_ms':>10}")
        lines = [head, "-" * len(head)]
        for r in self.runs:
            if not r.ok:
                lines.append(f"{r.scenario:<10}{r.method:<14}{r.horizon:>3}  ERROR {r.error.splitlines()[0]}")
                continue
            s = r.summary
            ms = s["solve_ms"]
            clr = "-" if s["min_clearance"] is None else f"{s['min_clearance']:.4f}"
            cells = [f"{ms[k]:>10.2f}" if ms[k] is not None else f"{'-':>10}" for k in ("max", "min", "median", "avg")]
            lines.append(
                f"{r.scenario:<10}{r.method:<14}{r.horizon:>3}  {str(s['reached_goal']):<5}"
                f"{str(s['collision']):<8}{clr:>9}" + "".join(cells)
            )
        return "\n".join(lines) + "\n"


def run_suite(
    scenarios: Sequence[Scenario],
    methods: Iterable[str],
    horizons: Iterable[int],
    out_dir,
    cfg: ALSPGConfig = ALSPGConfig(),
    include_timing: bool = True,
) -> SuiteReport:
    """Run the full cross product, persisting every trace; a failing run is
    recorded and the suite moves on."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    methods, horizons = list(methods), list(horizons)
    report = SuiteReport()
    for sc in scenarios:
        for method in methods:
            for N in horizons:
                rec = RunRecord(sc.name, method, int(N))
                try:
                    trace = run_closed_loop(sc.with_horizon(int(N)), method, cfg)
                    rec.csv_path = str(write_trace(trace, out_dir, include_timing))
                    rec.summary = trace.summary()
                except Exception as exc:  # noqa: BLE001 - reported per run
                    rec.error = f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}"
                report.runs.append(rec)
    (out_dir / "summary.txt").write_text(report.table(), encoding="utf-8")
    (out_dir / "summary.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
    return report


# -- SVG ------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_WIDTH = 720
_PAD = 30


def _f(x: float) -> str:
    return f"{x:.3f}"


def _obstacle_samples(duration: float, n: int = 6) -> np.ndarray:
    if duration <= 0:
        return np.zeros(1)
    return np.linspace(0.0, duration, n)


def emit_plot(traces: Sequence[SimTrace], path, n_samples: int = 6) -> Path:
    """Overlay robot paths; obstacles are drawn at a few sampled times with
    darker fill meaning later. Collision steps are marked with a cross."""
    traces = list(traces)
    if not traces:
        raise ValueError("emit_plot needs at least one trace")
    path = Path(path)
    sc = traces[0].scenario
    duration = max((t.rows[-1].t if t.rows else 0.0) for t in traces)
    times = _obstacle_samples(duration, n_samples)

    pts = [np.asarray(sc.robot.start), np.asarray(sc.robot.goal)]
    for t in traces:
        pts.extend(r.p for r in t.rows)
    circles = []
    for o in sc.obstacles:
        c0, vel = np.asarray(o.center), np.asarray(o.velocity)
        dyn = bool(np.any(vel != 0.0))
        for j, tt in enumerate(times if dyn else times[:1]):
            c = c0 + tt * vel
            alpha = 0.15 + 0.7 * (j / max(len(times) - 1, 1)) if dyn else 0.6
            circles.append((c, o.radius, alpha, tt))
            pts.extend([c - o.radius, c + o.radius])
    pts = np.asarray(pts, dtype=float)
    lo, hi = pts.min(axis=0) - 0.05, pts.max(axis=0) + 0.05
    scale = (_WIDTH - 2 * _PAD) / max(hi[0] - lo[0], hi[1] - lo[1])
    height = int(np.ceil((hi[1] - lo[1]) * scale + 2 * _PAD))

    def xy(p):
        return _f(_PAD + (p[0] - lo[0]) * scale), _f(height - _PAD - (p[1] - lo[1]) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{height}" '
        f'viewBox="0 0 {_WIDTH} {height}">',
        "<style>.obstacle{fill:#555;stroke:none}.start{fill:#000}.goal{fill:none;stroke:#000;stroke-width:2}"
        ".collision{stroke:#e00;stroke-width:2}.label{font:11px sans-serif}"
        + "".join(f".path-{i}{{fill:none;stroke:{_PALETTE[i % len(_PALETTE)]};stroke-width:2}}"
                  for i in range(len(traces)))
        + "</style>",
        f'<rect width="{_WIDTH}" height="{height}" fill="#fff"/>',
    ]
    for c, r, alpha, tt in circles:
        x, y = xy(c)
        out.append(f'<circle class="obstacle" cx="{x}" cy="{y}" r="{_f(r * scale)}" '
                   f'fill-opacity="{alpha:.2f}" data-t="{tt:.2f}"/>')
    for i, t in enumerate(traces):
        poly = [sc.robot.start] + [r.p for r in t.rows]
        coords = " ".join(",".join(xy(p)) for p in poly)
        out.append(f'<polyline class="path-{i}" data-method="{escape(t.method)}" points="{coords}"/>')
    x, y = xy(sc.robot.start)
    out.append(f'<circle class="start" cx="{x}" cy="{y}" r="5"/>')
    x, y = xy(sc.robot.goal)
    out.append(f'<circle class="goal" cx="{x}" cy="{y}" r="7"/>')
    for t in traces:
        prev = False
        for r in t.rows:
            hit = len(r.clearances) > 0 and float(np.min(r.clearances)) < 0.0
            if hit and not prev:
                x, y = (float(s) for s in xy(r.p))
                out.append(
                    f'<g class="collision" data-method="{escape(t.method)}" data-t="{r.t:.2f}">'
                    f'<line x1="{_f(x - 6)}" y1="{_f(y - 6)}" x2="{_f(x + 6)}" y2="{_f(y + 6)}"/>'
                    f'<line x1="{_f(x - 6)}" y1="{_f(y + 6)}" x2="{_f(x + 6)}" y2="{_f(y - 6)}"/>'
                    f'<text class="label" x="{_f(x + 8)}" y="{_f(y - 8)}">collision t={r.t:.2f}s</text></g>'
                )
            prev = hit
    for i, t in enumerate(traces):
        y = _PAD / 2 + 14 * i
        out.append(f'<line class="path-{i}" x1="{_PAD}" y1="{_f(y)}" x2="{_PAD + 20}" y2="{_f(y)}"/>')
        out.append(f'<text class="label" x="{_PAD + 26}" y="{_f(y + 4)}">'
                   f'{escape(t.method)} N={t.horizon}</text>')
    out.append("</svg>")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
