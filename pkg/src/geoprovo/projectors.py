"""Geometric projectors: velocity-obstacle cone complement, Euclidean clearance
disk complement, boxes and single halfplanes.

Every projector maps a point to its nearest point in the safe set and is the
identity on safe points.  The ``*_batch`` variants work row-wise on (n, 2)
arrays and are what the solver uses; the scalar functions wrap them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import (
    Box2,
    Disk,
    Hyperplane,
    Vec2,
    as_vec2,
    project_box,
    project_box_batch,
    project_halfplane,
    project_halfplane_batch,
    rotate,
)


class DegenerateConeError(ValueError):
    """Robot centre lies inside the inflated obstacle; the cone is undefined."""


@dataclass(frozen=True)
class VOCone:
    """Velocity obstacle ``{v : N_m . v < c_m for m = 1, 2}``.

    ``normals`` is (2, 2) with the outward unit normals as rows, ``offsets``
    holds ``c_m = N_m . apex``.
    """

    apex: Vec2
    normals: np.ndarray
    offsets: np.ndarray
    degenerate: bool = False

    @property
    def hyperplanes(self) -> tuple[Hyperplane, Hyperplane]:
        return (
            Hyperplane(self.normals[0], self.offsets[0]),
            Hyperplane(self.normals[1], self.offsets[1]),
        )

    def residuals(self, v) -> np.ndarray:
        """``N_m . v - c_m``; both negative means ``v`` is inside the cone."""
        return self.normals @ np.asarray(v, dtype=float) - self.offsets

    def contains(self, v) -> bool:
        if self.degenerate:
            return True
        return bool(np.all(self.residuals(v) < 0.0))


def build_vo_cone(p_robot, p_obs, v_obs, r_sum: float) -> VOCone:
    if not r_sum > 0:
        raise ValueError(f"r_sum must be positive, got {r_sum}")
    p_robot, p_obs, v_obs = as_vec2(p_robot), as_vec2(p_obs), as_vec2(v_obs)
    rel = p_robot - p_obs
    dist = float(np.hypot(rel[0], rel[1]))
    if dist <= r_sum:
        return VOCone(v_obs, np.full((2, 2), np.nan), np.full(2, np.nan), degenerate=True)
    beta = np.arcsin(r_sum / dist)
    t1 = rotate(rel, beta)
    t2 = rotate(rel, -beta)
    n1 = rotate(t1, -np.pi / 2) / dist
    n2 = rotate(t2, np.pi / 2) / dist
    normals = np.vstack([n1, n2])
    return VOCone(v_obs, normals, normals @ v_obs)


def flee_hyperplane(p_robot, p_obs, v_obs) -> Hyperplane:
    """Fallback constraint for a degenerate cone: relative velocity must point
    away from the obstacle centre (``+x`` if the centres coincide)."""
    away = as_vec2(p_robot) - as_vec2(p_obs)
    norm = np.hypot(away[0], away[1])
    n = away / norm if norm > 0 else np.array([1.0, 0.0])
    return Hyperplane(n, float(n @ as_vec2(v_obs)))


def vo_margin_batch(V: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Signed margin ``max_m (N_m . v - c_m)``: >= 0 outside the cone, and
    minus the distance to the nearest edge line inside it."""
    s = np.einsum("imj,ij->im", normals, V) - offsets
    return s.max(axis=1)


def geopro_vo_batch(V: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Row-wise GeoPro-VO; ``normals`` is (n, 2, 2), ``offsets`` (n, 2)."""
    s = np.einsum("imj,ij->im", normals, V) - offsets
    inside = (s[:, 0] < 0.0) & (s[:, 1] < 0.0)
    # argmax of a negative residual == smallest |residual|; ties go to m = 1
    m = np.argmax(s, axis=1)
    rows = np.arange(V.shape[0])
    shift = normals[rows, m] * np.where(inside, s[rows, m], 0.0)[:, None]
    return V - shift


def geopro_vo(v, cone: VOCone) -> Vec2:
    if cone.degenerate:
        raise DegenerateConeError("robot overlaps the inflated obstacle")
    v = np.asarray(v, dtype=float)
    return geopro_vo_batch(v[None], cone.normals[None], cone.offsets[None])[0]


def geopro_ed_batch(P: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    d = P - centers
    dist = np.hypot(d[:, 0], d[:, 1])
    unsafe = dist < radii
    coincident = dist == 0.0
    safe_dist = np.where(coincident, 1.0, dist)
    direction = np.where(coincident[:, None], np.array([1.0, 0.0]), d / safe_dist[:, None])
    return np.where(unsafe[:, None], centers + direction * radii[:, None], P)


def geopro_ed(p, obs: Disk, r_robot: float) -> Vec2:
    p = np.asarray(p, dtype=float)
    radius = np.array([r_robot + obs.radius])
    return geopro_ed_batch(p[None], obs.center[None], radius)[0]


class ProjectorKind(enum.Enum):
    VO = "vo"
    EUCLIDEAN_DISTANCE = "ed"
    STATE_BOX = "box"
    HALFPLANE = "halfplane"


@dataclass(frozen=True)
class ProjectorSpec:
    kind: ProjectorKind
    cone: Optional[VOCone] = None
    disk: Optional[Disk] = None
    r_robot: float = 0.0
    box: Optional[Box2] = None
    halfplane: Optional[Hyperplane] = None

    def __post_init__(self):
        expected = {
            ProjectorKind.VO: "cone",
            ProjectorKind.EUCLIDEAN_DISTANCE: "disk",
            ProjectorKind.STATE_BOX: "box",
            ProjectorKind.HALFPLANE: "halfplane",
        }[self.kind]
        populated = [f for f in ("cone", "disk", "box", "halfplane") if getattr(self, f) is not None]
        if populated != [expected]:
            raise ValueError(f"{self.kind.name} projector needs exactly '{expected}', got {populated}")

    @classmethod
    def vo(cls, cone: VOCone) -> "ProjectorSpec":
        return cls(ProjectorKind.VO, cone=cone)

    @classmethod
    def ed(cls, disk: Disk, r_robot: float) -> "ProjectorSpec":
        return cls(ProjectorKind.EUCLIDEAN_DISTANCE, disk=disk, r_robot=r_robot)

    @classmethod
    def state_box(cls, box: Box2) -> "ProjectorSpec":
        return cls(ProjectorKind.STATE_BOX, box=box)

    @classmethod
    def half(cls, plane: Hyperplane) -> "ProjectorSpec":
        return cls(ProjectorKind.HALFPLANE, halfplane=plane)


def apply_projector(spec: ProjectorSpec, value) -> Vec2:
    value = np.asarray(value, dtype=float)
    if spec.kind is ProjectorKind.VO:
        return geopro_vo(value, spec.cone)
    if spec.kind is ProjectorKind.EUCLIDEAN_DISTANCE:
        return geopro_ed(value, spec.disk, spec.r_robot)
    if spec.kind is ProjectorKind.STATE_BOX:
        return project_box(value, spec.box)
    return project_halfplane(value, spec.halfplane)
