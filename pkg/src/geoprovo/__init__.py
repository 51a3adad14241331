"""Velocity-obstacle constrained NMPC solved with an augmented Lagrangian
spectral projected gradient method, plus baselines and an experiment harness."""
from .alspg import ALSPGConfig, ALSPGStats, alspg_solve, distance_function, eval_lagrangian
from .baselines import (
    OracleCapError,
    OracleTimeout,
    format_big_m,
    minlp_enumerate,
    reactive_vo_step,
)
from .dynamics import RobotState, adjoint_multiply, linearize, rollout, step
from .geometry import Box2, Disk, Hyperplane, vec2
from .harness import emit_plot, run_suite
from .planner import METHODS, plan_step, run_closed_loop
from .problem import NMPCProblem, Obstacle, build_blocks, build_cost
from .projectors import (
    DegenerateConeError,
    ProjectorKind,
    ProjectorSpec,
    VOCone,
    apply_projector,
    build_vo_cone,
    geopro_ed,
    geopro_vo,
)
from .scenario import Scenario, ScenarioError, load_scenario, shipped_scenario
from .spg import NumericalFailure, SPGConfig, spg_minimize
from .trace import SimTrace, read_trace, trace_to_csv, write_trace

__version__ = "0.1.0"
