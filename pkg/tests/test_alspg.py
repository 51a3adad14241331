import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoprovo.alspg import RHO_MAX, ALSPGConfig, alspg_solve, distance_function, eval_lagrangian
from geoprovo.dynamics import RobotState, rollout
from geoprovo.geometry import Box2, Disk, vec2
from geoprovo.problem import ConstraintBlock, NMPCProblem, Obstacle, build_blocks, build_cost
from geoprovo.projectors import ProjectorSpec, build_vo_cone
from geoprovo.spg import SPGConfig, spg_minimize
from oracles import brute_boundary_distance, central_diff, cone_edges


def random_problem(rng, N, n_obs=1):
    obstacles = tuple(
        Obstacle(Disk(rng.uniform(0.2, 1.0, 2), rng.uniform(0.05, 0.2)), rng.normal(0, 0.2, 2))
        for _ in range(n_obs)
    )
    x0 = RobotState(rng.uniform(-0.2, 0.2, 2), rng.uniform(-0.3, 0.3, 2))
    return NMPCProblem(x0, rng.uniform(1, 2, 2), horizon_N=N, obstacles=obstacles)


def test_config_validation():
    for bad in (dict(beta=1.0), dict(rho_init=0.0), dict(eps_tol=0.0), dict(N_max=0)):
        with pytest.raises(ValueError):
            ALSPGConfig(**bad)


def test_no_blocks_reduces_to_cost():
    rng = np.random.default_rng(0)
    pr = random_problem(rng, 4, n_obs=0)
    U = rng.normal(size=(4, 2))
    val, grad = eval_lagrangian(U, [], pr)
    X = rollout(pr.x0, U, pr.dt)
    assert val == pytest.approx(build_cost(pr)(X, U)[0], rel=1e-14)
    fd = central_diff(lambda Z: build_cost(pr)(rollout(pr.x0, Z, pr.dt), Z)[0], U)
    np.testing.assert_allclose(grad, fd, rtol=1e-6, atol=1e-8)


def test_satisfied_blocks_add_nothing():
    pr = NMPCProblem(RobotState((0, 0), (0.1, 0)), (1, 0), horizon_N=3)
    U = np.zeros((3, 2))
    blocks = build_blocks(pr, rollout(pr.x0, U, pr.dt))
    assert eval_lagrangian(U, blocks, pr)[0] == pytest.approx(eval_lagrangian(U, [], pr)[0], abs=0)
    np.testing.assert_array_equal(eval_lagrangian(U, blocks, pr)[1], eval_lagrangian(U, [], pr)[1])


def test_cost_examples():
    pr = NMPCProblem(RobotState((0, 0), (0, 0)), (0, 0), horizon_N=1)
    val, JX, JU = build_cost(pr)(np.zeros((1, 4)), np.zeros((1, 2)))
    assert val == 0 and not JX.any() and not JU.any()
    pr = NMPCProblem(RobotState((0, 0), (0, 0)), (0, 0), horizon_N=1, q_v=0.0)
    X = np.array([[1.0, 0, 0, 0]])
    assert build_cost(pr)(X, np.zeros((1, 2)))[0] == pytest.approx(10.0)


def test_cost_jacobians_match_finite_differences():
    rng = np.random.default_rng(1)
    pr = random_problem(rng, 5)
    cost = build_cost(pr)
    X, U = rng.normal(size=(5, 4)), rng.normal(size=(5, 2))
    _, JX, JU = cost(X, U)
    np.testing.assert_allclose(JX, central_diff(lambda Z: cost(Z, U)[0], X), rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(JU, central_diff(lambda Z: cost(X, Z)[0], U), rtol=1e-6, atol=1e-8)


def test_gradient_two_blocks_n4():
    rng = np.random.default_rng(2)
    pr = random_problem(rng, 4)
    U = rng.normal(size=(4, 2))
    blocks = build_blocks(pr, rollout(pr.x0, U, pr.dt))[:2]
    for b in blocks:
        b.lam = rng.normal(size=2)
        b.rho = 5.0
    _, g = eval_lagrangian(U, blocks, pr)
    fd = central_diff(lambda Z: eval_lagrangian(Z, blocks, pr)[0], U)
    assert np.linalg.norm(g - fd) <= 1e-5 * max(1.0, np.linalg.norm(fd))


def test_distance_function_examples():
    pr = NMPCProblem(RobotState((0, 0), (0, 0)), (1, 0), horizon_N=1)
    U = np.zeros((1, 2))
    box = ConstraintBlock(ProjectorSpec.state_box(Box2.symmetric(0.4)), 1, "v", np.zeros(2), 1.0, ("vbox", 1))
    np.testing.assert_array_equal(distance_function(U, box, pr), [0, 0])
    # velocity at step 1 is 0.5 + dt * 0 ... start above the box by delta
    fast = NMPCProblem(RobotState((0, 0), (0.45, 0)), (1, 0), horizon_N=1)
    np.testing.assert_allclose(distance_function(U, box, fast), [0.05, 0], atol=1e-15)
    # VO block with an unsafe velocity: |V| is the distance to the nearest edge line
    cone = build_vo_cone(vec2(0, 0), vec2(1, 0), vec2(0, 0), 0.5)
    vo = ConstraintBlock(ProjectorSpec.vo(cone), 1, "v", np.zeros(2), 1.0, ("obs", 0, 1))
    slow = NMPCProblem(RobotState((0, 0), (0.3, 0.05)), (1, 0), horizon_N=1)
    V = distance_function(U, vo, slow)
    best, res = brute_boundary_distance(vec2(0.3, 0.05), cone.apex, cone_edges(vec2(0, 0), vec2(1, 0), cone.apex, 0.5))
    assert best - res <= np.linalg.norm(V) <= best + 1e-12


def test_no_blocks_one_outer_iteration_equals_spg():
    pr = NMPCProblem(RobotState((0, 0), (0, 0)), (0.3, 0.1), horizon_N=3, v_box=Box2.symmetric(100.0))
    U, stats = alspg_solve(pr, np.zeros((3, 2)), ALSPGConfig())
    # velocity-box blocks are always present; with a huge box they are inactive
    assert stats.outer_iterations == 1 and stats.converged and stats.norm_V == 0.0
    cost = build_cost(pr)
    U_ref, _ = spg_minimize(
        lambda Z: (cost(rollout(pr.x0, Z, pr.dt), Z)[0],
                   eval_lagrangian(Z, [], pr)[1]),
        lambda Z: np.clip(Z, -1, 1), np.zeros((3, 2)))
    np.testing.assert_allclose(U, U_ref, atol=1e-12)


def test_box_violating_block_converges():
    # start faster than v_max with the goal far ahead: the velocity box binds
    pr = NMPCProblem(RobotState((0, 0), (0.4, 0.0)), (5, 0), horizon_N=6)
    U, stats = alspg_solve(pr, np.zeros((6, 2)), ALSPGConfig())
    assert stats.converged and stats.norm_V <= 1e-2 and stats.outer_iterations <= 20
    assert np.all(np.abs(rollout(pr.x0, U, pr.dt)[:, 2:]) <= 0.4 + 1e-2)


def test_multiplier_update_identity():
    pr = NMPCProblem(RobotState((0, 0), (0.4, 0.0)), (5, 0), horizon_N=4)
    cfg = ALSPGConfig(N_max=2, eps_tol=1e-12, rebuild=False)
    U, stats = alspg_solve(pr, np.zeros((4, 2)), cfg)
    assert stats.outer_iterations == 2
    blocks = build_blocks(pr, rollout(pr.x0, np.zeros((4, 2)), pr.dt))
    after_first = stats.rho_history[0]
    for b in blocks:
        rho1, lam1 = after_first[b.block_id]
        b.rho, b.lam = rho1, lam1
        V = distance_function(U, b, pr)
        rho2, lam2 = stats.rho_history[1][b.block_id]
        np.testing.assert_allclose(lam2, rho1 * (V + lam1 / rho1), rtol=1e-12, atol=1e-15)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5))
def test_penalty_is_monotone_power_of_beta_and_loop_terminates(seed, N):
    rng = np.random.default_rng(seed)
    pr = random_problem(rng, N, n_obs=2)
    cfg = ALSPGConfig(N_max=6, spg=SPGConfig(max_iters=30))
    _, stats = alspg_solve(pr, rng.uniform(-1, 1, (N, 2)), cfg)
    assert stats.outer_iterations <= cfg.N_max
    prev = {}
    for snap in stats.rho_history:
        for bid, (rho, lam) in snap.items():
            j = np.log(rho / cfg.rho_init) / np.log(cfg.beta)
            assert abs(j - round(j)) < 1e-9 and round(j) >= 0
            assert rho <= RHO_MAX
            assert rho >= prev.get(bid, cfg.rho_init)
            assert np.all(np.isfinite(lam))
            prev[bid] = rho
