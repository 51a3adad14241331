"""Planar geometry primitives shared by the projectors and planners.

Vectors are plain ``numpy`` arrays of shape ``(2,)``; the small value types
below only wrap the parameters that need validation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Vec2 = np.ndarray


def vec2(x: float, y: float) -> Vec2:
    return np.array([float(x), float(y)])


def as_vec2(v) -> Vec2:
    out = np.asarray(v, dtype=float).reshape(2)
    if not np.all(np.isfinite(out)):
        raise ValueError(f"non-finite vector {out!r}")
    return out


def rotate(v: Vec2, beta: float) -> Vec2:
    c, s = np.cos(beta), np.sin(beta)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


@dataclass(frozen=True)
class Hyperplane:
    """Halfplane ``{y : normal . y >= offset}``; the normal is stored unit length."""

    normal: Vec2
    offset: float

    def __post_init__(self):
        n = as_vec2(self.normal)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise ValueError("hyperplane normal must be non-zero")
        # rescale the offset with the normal so the halfplane itself is unchanged
        object.__setattr__(self, "normal", n / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)


@dataclass(frozen=True)
class Box2:
    lower: Vec2
    upper: Vec2

    def __post_init__(self):
        lo, hi = as_vec2(self.lower), as_vec2(self.upper)
        if np.any(lo > hi):
            raise ValueError(f"box lower {lo} exceeds upper {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def symmetric(cls, half_width: float) -> "Box2":
        return cls(vec2(-half_width, -half_width), vec2(half_width, half_width))


@dataclass(frozen=True)
class Disk:
    center: Vec2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vec2(self.center))
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")


def project_halfplane_batch(V: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Row-wise projection of ``V`` (n, 2) onto halfplanes with unit ``normals``."""
    s = np.einsum("ij,ij->i", normals, V) - offsets
    return V - normals * np.minimum(s, 0.0)[:, None]


def project_halfplane(v: Vec2, h: Hyperplane) -> Vec2:
    s = h.normal @ v - h.offset
    if s >= 0.0:
        return np.array(v, dtype=float)
    return v - h.normal * s


def project_box_batch(V: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(V, lower), upper)


def project_box(v: Vec2, b: Box2) -> Vec2:
    return np.minimum(np.maximum(v, b.lower), b.upper)
