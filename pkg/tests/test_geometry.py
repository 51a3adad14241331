import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoprovo.geometry import (
    Box2,
    Disk,
    Hyperplane,
    as_vec2,
    project_box,
    project_halfplane,
    rotate,
    vec2,
)

coord = st.floats(-10, 10, allow_nan=False)
angle = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


def test_rotate_examples():
    np.testing.assert_allclose(rotate(vec2(1, 0), np.pi / 2), [0, 1], atol=1e-15)
    np.testing.assert_array_equal(rotate(vec2(3, 4), 0.0), [3, 4])
    np.testing.assert_allclose(rotate(vec2(1, 0), np.pi / 6), [np.sqrt(3) / 2, 0.5], atol=1e-15)


@given(coord, coord, angle)
def test_rotate_preserves_norm(x, y, beta):
    v = vec2(x, y)
    assert abs(np.linalg.norm(rotate(v, beta)) - np.linalg.norm(v)) <= 1e-12 * max(1.0, np.linalg.norm(v))


def test_as_vec2_rejects_non_finite():
    with pytest.raises(ValueError):
        as_vec2([np.nan, 0.0])
    with pytest.raises(ValueError):
        as_vec2([0.0, np.inf])


def test_hyperplane_normalises():
    h = Hyperplane(vec2(3, 4), 10.0)
    assert abs(np.linalg.norm(h.normal) - 1) < 1e-12
    assert h.offset == pytest.approx(2.0)
    with pytest.raises(ValueError):
        Hyperplane(vec2(0, 0), 1.0)


def test_box_and_disk_validation():
    with pytest.raises(ValueError):
        Box2(vec2(1, 0), vec2(0, 1))
    with pytest.raises(ValueError):
        Disk(vec2(0, 0), 0.0)
    with pytest.raises(ValueError):
        Disk(vec2(0, 0), -1.0)


def test_project_halfplane_examples():
    np.testing.assert_array_equal(project_halfplane(vec2(1, -2), Hyperplane(vec2(0, 1), 0)), [1, 0])
    np.testing.assert_array_equal(project_halfplane(vec2(5, 5), Hyperplane(vec2(1, 0), 0)), [5, 5])
    r = project_halfplane(vec2(0, 0), Hyperplane(vec2(np.sqrt(2) / 2, np.sqrt(2) / 2), 1.0))
    np.testing.assert_allclose(r, [np.sqrt(2) / 2, np.sqrt(2) / 2], atol=1e-12)


def test_project_box_examples():
    np.testing.assert_array_equal(project_box(vec2(0.5, 0.2), Box2.symmetric(0.4)), [0.4, 0.2])
    np.testing.assert_array_equal(project_box(vec2(0, 0), Box2.symmetric(1)), [0, 0])
    np.testing.assert_array_equal(project_box(vec2(-3, 3), Box2.symmetric(1)), [-1, 1])


@given(coord, coord, angle, coord)
def test_halfplane_projection_lands_on_plane_and_is_idempotent(x, y, a, c):
    h = Hyperplane(vec2(np.cos(a), np.sin(a)), c)
    v = vec2(x, y)
    p = project_halfplane(v, h)
    if h.normal @ v < h.offset:
        assert abs(h.normal @ p - h.offset) <= 1e-12 * max(1.0, abs(c), np.abs(v).max())
    else:
        np.testing.assert_array_equal(p, v)
    np.testing.assert_allclose(project_halfplane(p, h), p, atol=1e-12)


@given(coord, coord, coord, coord)
def test_box_projection_idempotent_bitwise(x, y, a, b):
    box = Box2(vec2(min(a, b), min(a, b)), vec2(max(a, b), max(a, b)))
    p = project_box(vec2(x, y), box)
    assert np.array_equal(project_box(p, box), p)
    assert np.all(p >= box.lower) and np.all(p <= box.upper)


def test_halfplane_projection_is_nearest_against_grid():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a = rng.uniform(0, 2 * np.pi)
        h = Hyperplane(vec2(np.cos(a), np.sin(a)), rng.normal())
        v = rng.normal(size=2) * 2
        p = project_halfplane(v, h)
        dist = np.linalg.norm(v - p)
        if dist == 0:
            continue
        radius = 2 * dist
        ax = np.linspace(-radius, radius, 201)
        gx, gy = np.meshgrid(ax, ax)
        pts = v + np.column_stack([gx.ravel(), gy.ravel()])
        pts = pts[pts @ h.normal >= h.offset]
        res = ax[1] - ax[0]
        assert np.min(np.linalg.norm(pts - v, axis=1)) >= dist - res
