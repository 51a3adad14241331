import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoprovo.alspg import ALSPGConfig, alspg_solve
from geoprovo.baselines import (
    BIG_M,
    OracleCapError,
    OracleTimeout,
    ed_nmpc_method,
    format_big_m,
    minlp_enumerate,
    preferred_velocity,
    reactive_vo_step,
)
from geoprovo.dynamics import RobotState, rollout
from geoprovo.geometry import Box2, Disk
from geoprovo.problem import NMPCProblem, Obstacle
from geoprovo.projectors import build_vo_cone


def lattice(v_max, n):
    return np.linspace(-v_max, v_max, n)


def test_no_obstacles_returns_nearest_lattice_point():
    v, flag = reactive_vo_step((0, 0), (0, 0), (1, 0.3), [], 0.4)
    v_pref = preferred_velocity((0, 0), (1, 0.3), 0.4, 0.05)
    ax = lattice(0.4, 41)
    want = [ax[np.argmin(np.abs(ax - v_pref[0]))], ax[np.argmin(np.abs(ax - v_pref[1]))]]
    np.testing.assert_allclose(v, want)
    assert not flag


def test_preferred_velocity_slows_near_goal():
    np.testing.assert_allclose(preferred_velocity((0, 0), (0.01, 0), 0.4, 0.05), [0.2, 0])
    np.testing.assert_array_equal(preferred_velocity((1, 1), (1, 1), 0.4, 0.05), [0, 0])


def test_head_on_obstacle_deflects():
    obs = [((0.5, 0.0), (0.0, 0.0), 0.1)]
    v, flag = reactive_vo_step((0, 0), (0, 0), (2, 0), obs, 0.4)
    cone = build_vo_cone((0, 0), (0.5, 0), (0, 0), 0.23)
    assert not cone.contains(v) and not flag
    assert not np.allclose(v, preferred_velocity((0, 0), (2, 0), 0.4, 0.05))


def test_deep_overlap_falls_back_and_flags():
    # robot surrounded by obstacles moving at it from every side
    obs = [((0.25 * np.cos(a), 0.25 * np.sin(a)), (-0.3 * np.cos(a), -0.3 * np.sin(a)), 0.1)
           for a in np.linspace(0, 2 * np.pi, 12, endpoint=False)]
    v, flag = reactive_vo_step((0, 0), (0, 0), (1, 0), obs, 0.4)
    assert flag
    assert v.shape == (2,)


def test_grid_validation():
    for n in (2, 40, 1):
        with pytest.raises(ValueError):
            reactive_vo_step((0, 0), (0, 0), (1, 0), [], 0.4, grid_n=n)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(0.3, 1.0), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3),
       st.sampled_from([5, 11, 21]))
def test_reactive_output_outside_every_vo_when_possible(ang, dist, vx, vy, n):
    center = (dist * np.cos(ang), dist * np.sin(ang))
    obs = [(center, (vx, vy), 0.1), ((-0.4, 0.1), (0.1, 0.0), 0.1)]
    v, flag = reactive_vo_step((0, 0), (0, 0), (1, 0), obs, 0.4, grid_n=n)
    cones = [build_vo_cone((0, 0), c, w, 0.1 + r + 0.03) for c, w, r in obs]
    ax = lattice(0.4, n)
    any_safe = any(
        all(not c.contains((a, b)) for c in cones) for a in ax for b in ax
    )
    assert flag == (not any_safe)
    if any_safe:
        assert all(not c.contains(v) for c in cones)


def single_obstacle_problem():
    obs = Obstacle(Disk((0.45, 0.02), 0.1), (-0.1, 0.0))
    return NMPCProblem(RobotState((0, 0), (0.2, 0.0)), (1.5, 0.0), horizon_N=2, dt=0.1,
                       a_box=Box2.symmetric(2.0), obstacles=(obs,))


def test_oracle_without_obstacles_matches_plain_solve():
    pr = NMPCProblem(RobotState((0, 0), (0, 0)), (0.5, 0.2), horizon_N=3)
    res = minlp_enumerate(pr)
    assert res.assignments == 1 and res.feasible_count == 1
    U, _ = alspg_solve(pr, np.zeros((3, 2)))
    np.testing.assert_allclose(res.U_opt, U, atol=1e-12)


def test_oracle_enumerates_all_assignments():
    res = minlp_enumerate(single_obstacle_problem())
    assert res.assignments == 4
    assert res.feasible_count >= 1 and len(res.best_assignment) == 2


def test_oracle_two_obstacles_count():
    pr = single_obstacle_problem()
    pr2 = NMPCProblem(pr.x0, pr.goal, horizon_N=2, dt=0.1, a_box=pr.a_box,
                      obstacles=pr.obstacles + (Obstacle(Disk((0.0, 0.6), 0.1)),))
    assert minlp_enumerate(pr2).assignments == 2 ** 4


def test_oracle_cap_and_timeout():
    pr = NMPCProblem(RobotState((0, 0), (0, 0)), (1, 0), horizon_N=9,
                     obstacles=(Obstacle(Disk((0.5, 0.3), 0.1)),))
    with pytest.raises(OracleCapError):
        minlp_enumerate(pr)
    with pytest.raises(OracleTimeout) as info:
        minlp_enumerate(pr, max_pairs=None, deadline=0.01)
    assert info.value.total == 2 ** 9 and info.value.evaluated < info.value.total


def test_oracle_reports_infeasible_when_boxed_in():
    obs = Obstacle(Disk((0.24, 0.0), 0.1))
    pr = NMPCProblem(RobotState((0, 0), (0.4, 0.0)), (1, 0), horizon_N=2, obstacles=(obs,))
    res = minlp_enumerate(pr, ALSPGConfig(N_max=8))
    assert res.feasible_count == 0 and res.U_opt is None and res.cost == np.inf


def test_big_m_printer():
    pr = single_obstacle_problem()
    text = format_big_m(pr, rollout(pr.x0, np.zeros((2, 2)), pr.dt))
    assert f"G = {BIG_M:g}" in text
    assert text.count("z[0,1,1] + z[0,1,2] >= 1") == 1


def test_ed_method_handle():
    ctrl = ed_nmpc_method()
    assert ctrl.avoidance == "ed"
