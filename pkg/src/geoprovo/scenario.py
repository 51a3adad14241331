"""Scenario files: a JSON document describing the robot, obstacles and run
parameters.  Omitted parameters fall back to the default limits."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import problem as _p


class ScenarioError(ValueError):
    """Malformed or invalid scenario document."""


DEFAULT_PARAMS = {
    "dt": _p.DT,
    "N": _p.HORIZON,
    "v_max": _p.V_MAX,
    "a_max": _p.A_MAX,
    "d_s": _p.SAFE_MARGIN,
    "goal_tol": 0.05,
    "max_time": 30.0,
}


@dataclass(frozen=True)
class RobotSpec:
    start: tuple
    goal: tuple
    r: float = _p.ROBOT_RADIUS


@dataclass(frozen=True)
class ObstacleSpec:
    center: tuple
    radius: float
    velocity: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class Params:
    dt: float = DEFAULT_PARAMS["dt"]
    N: int = DEFAULT_PARAMS["N"]
    v_max: float = DEFAULT_PARAMS["v_max"]
    a_max: float = DEFAULT_PARAMS["a_max"]
    d_s: float = DEFAULT_PARAMS["d_s"]
    goal_tol: float = DEFAULT_PARAMS["goal_tol"]
    max_time: float = DEFAULT_PARAMS["max_time"]


@dataclass(frozen=True)
class Scenario:
    name: str
    robot: RobotSpec
    obstacles: tuple = ()
    params: Params = field(default_factory=Params)
    seed: int = 0

    def __post_init__(self):
        validate(self)

    def with_horizon(self, N: int) -> "Scenario":
        params = Params(**{**asdict(self.params), "N": int(N)})
        return Scenario(self.name, self.robot, self.obstacles, params, self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["robot"] = {k: list(v) if isinstance(v, tuple) else v for k, v in d["robot"].items()}
        d["obstacles"] = [
            {k: list(v) if isinstance(v, tuple) else v for k, v in o.items()} for o in d["obstacles"]
        ]
        return d


def _finite_pair(value, where: str) -> tuple:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}: expected a pair of numbers, got {value!r}") from None
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{where}: expected a finite pair of numbers, got {value!r}")
    return (float(arr[0]), float(arr[1]))


def validate(s: Scenario) -> None:
    if not s.robot.r > 0:
        raise ScenarioError("robot.r: radius must be positive")
    for i, o in enumerate(s.obstacles):
        if not o.radius > 0:
            raise ScenarioError(f"obstacles[{i}].radius: radius must be positive")
    p = s.params
    for name in ("dt", "v_max", "a_max", "goal_tol", "max_time"):
        if not getattr(p, name) > 0:
            raise ScenarioError(f"params.{name}: must be positive")
    if p.d_s < 0:
        raise ScenarioError("params.d_s: must be non-negative")
    if int(p.N) != p.N or p.N < 1:
        raise ScenarioError("params.N: horizon must be an integer >= 1")


def _reject_unknown(obj: dict, allowed, where: str) -> None:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ScenarioError(f"{where}: unknown field(s) {', '.join(unknown)}")


def scenario_from_dict(doc: dict) -> Scenario:
    _reject_unknown(doc, ("name", "robot", "obstacles", "params", "seed"), "scenario")
    for key in ("name", "robot"):
        if key not in doc:
            raise ScenarioError(f"scenario: missing required field '{key}'")

    robot = doc["robot"]
    _reject_unknown(robot, ("start", "goal", "r"), "robot")
    for key in ("start", "goal"):
        if key not in robot:
            raise ScenarioError(f"robot: missing required field '{key}'")
    robot_spec = RobotSpec(
        _finite_pair(robot["start"], "robot.start"),
        _finite_pair(robot["goal"], "robot.goal"),
        float(robot.get("r", _p.ROBOT_RADIUS)),
    )

    obstacles = []
    raw_obs = doc.get("obstacles", [])
    if not isinstance(raw_obs, list):
        raise ScenarioError("obstacles: expected an array")
    for i, o in enumerate(raw_obs):
        where = f"obstacles[{i}]"
        _reject_unknown(o, ("center", "radius", "velocity"), where)
        if "center" not in o or "radius" not in o:
            raise ScenarioError(f"{where}: 'center' and 'radius' are required")
        obstacles.append(
            ObstacleSpec(
                _finite_pair(o["center"], f"{where}.center"),
                float(o["radius"]),
                _finite_pair(o.get("velocity", (0.0, 0.0)), f"{where}.velocity"),
            )
        )

    params = doc.get("params", {})
    _reject_unknown(params, DEFAULT_PARAMS, "params")
    merged = {**DEFAULT_PARAMS, **params}
    try:
        merged = {k: (int(v) if k == "N" and float(v).is_integer() else float(v)) for k, v in merged.items()}
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"params: {exc}") from None

    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise ScenarioError("seed: expected an integer")
    return Scenario(str(doc["name"]), robot_spec, tuple(obstacles), Params(**merged), seed)


def load_scenario(path) -> Scenario:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def shipped_scenario_path(name: str) -> Path:
    return Path(str(resources.files("geoprovo") / "scenarios" / f"{name}.json"))


def shipped_scenario(name: str) -> Scenario:
    return load_scenario(shipped_scenario_path(name))
