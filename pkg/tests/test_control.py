"""Control stack: costs, iLQG planning, PD baseline, gate transitions,
and closed-loop navigation against the simulator."""
import math

import numpy as np
import pytest

from tiltmaze.control import (CostConfig, LearnedDynamics, NavigatorConfig,
                              PdGains, TargetCost, cost_control, cost_state,
                              fd_jacobians, ilqg, learn_transition_clusters,
                              navigate_maze, pairs_from_geometry, pd_action,
                              run_repositioning, settling_metrics, simulate,
                              state_error, transition_action)
from tiltmaze.core.angles import angle_diff, wrap_angle
from tiltmaze.core.errors import ValidationError
from tiltmaze.core.geometry import MazeGeometry
from tiltmaze.core.state import BallState, FullState, PlatformState, Trajectory
from tiltmaze.physics import BasisConfig
from tiltmaze.rollout import rollout_batch
from tiltmaze.sim.config import SimConfig
from tiltmaze.sim.dynamics import true_ball_accel
from tiltmaze.sim.simulator import MazeSimulator
from tiltmaze.sysid.arx import ArxModel

GEO = MazeGeometry()
SIM_CFG = SimConfig()
DT = SIM_CFG.dt


class _TrueModel:
    """Acceleration oracle: the simulator's own ball dynamics."""

    def __init__(self, ring=1, cfg=SIM_CFG):
        self.radius = cfg.geometry.ring_radii[ring - 1]
        self.cfg = cfg

    def predict(self, X, return_std=False):
        X = np.asarray(X, dtype=float)
        mean = true_ball_accel(
            X[:, 0], X[:, 1], X[:, 2], X[:, 3], X[:, 4], X[:, 5], X[:, 6],
            ring_radius=self.radius, gravity=self.cfg.gravity,
            viscous_coeff=self.cfg.viscous_coeff,
            dry_coeff=self.cfg.dry_coeff,
            dry_smoothing=self.cfg.dry_smoothing)
        if return_std:
            return mean, np.zeros_like(mean)
        return mean


def _platform_arx(cfg=SIM_CFG):
    """Pole-placed ARX(2, 1) matching the actuator's poles and DC gain."""
    act = cfg.actuator
    zw = act.damping_ratio * act.natural_freq
    wd = act.natural_freq * math.sqrt(1.0 - act.damping_ratio ** 2)
    p = math.exp(-zw * cfg.dt)
    a1 = 2.0 * p * math.cos(wd * cfg.dt)
    a2 = -p * p
    b1 = act.tilt_gain * (1.0 - a1 - a2)
    return ArxModel(n_a=2, n_b=1, delay=cfg.delay_samples + 1,
                    a=np.array([a1, a2]), b=np.array([b1]),
                    residual_var=0.0)


def _dynamics(ring=1):
    arx = _platform_arx()
    return LearnedDynamics(_TrueModel(ring), arx, arx, dt=DT)


# ---------------------------------------------------------------- costs


def test_cost_state_zero_at_target():
    cfg = CostConfig()
    x = np.array([1.2, -0.4, 0.05, 0.0, -0.02, 0.3])
    value, grad, hess = cost_state(x, x, cfg)
    assert value == 0.0
    assert np.all(grad == 0.0)
    # curvature at the minimum: w_i / alpha on the diagonal
    expected = np.asarray(cfg.state_weights) / cfg.smooth_abs_width
    assert np.allclose(np.diag(hess), expected)


def test_cost_state_approaches_absolute_value():
    cfg = CostConfig(state_weights=(1.0, 0, 0, 0, 0, 0))
    x = np.zeros(6)
    t = np.zeros(6)
    x[0] = 3.0
    value, _, _ = cost_state(x, t, cfg)
    assert abs(value - (3.0 - cfg.smooth_abs_width)) < 1e-3


def test_cost_state_wraps_theta():
    cfg = CostConfig(state_weights=(1.0, 0, 0, 0, 0, 0))
    x = np.zeros(6)
    t = np.zeros(6)
    x[0], t[0] = 3.0, -3.0
    value, grad, _ = cost_state(x, t, cfg)
    # shortest arc is 2 pi - 6 ~ 0.283, not 6
    assert value < 0.3
    assert grad[0] < 0  # error is negative: x sits behind t shortest-arc


def test_cost_state_terminal_multiplier():
    cfg = CostConfig()
    x = np.array([0.5, 0.1, 0.0, 0.0, 0.0, 0.0])
    t = np.zeros(6)
    v1, g1, h1 = cost_state(x, t, cfg)
    v2, g2, h2 = cost_state(x, t, cfg, terminal=True)
    assert np.isclose(v2, cfg.terminal_multiplier * v1)
    assert np.allclose(g2, cfg.terminal_multiplier * g1)
    assert np.allclose(h2, cfg.terminal_multiplier * h1)


def test_cost_control_zero_and_taylor():
    cfg = CostConfig()
    value, grad, hess = cost_control(np.zeros(2), cfg)
    assert value == 0.0
    assert np.all(grad == 0.0)
    assert np.allclose(hess, np.eye(2))
    # small-command regime is quadratic: u^2 / 2 within 1%
    for mag in (0.01, 0.05, 0.1):
        u = np.array([mag * cfg.control_scale, 0.0])
        v, _, _ = cost_control(u, cfg)
        assert abs(v - 0.5 * u[0] ** 2) < 0.01 * 0.5 * u[0] ** 2


def test_cost_state_derivatives_match_fd():
    cfg = CostConfig()
    rng = np.random.default_rng(3)
    eps = 1e-6
    for _ in range(100):
        x = rng.uniform(-2, 2, 6)
        t = rng.uniform(-2, 2, 6)
        value, grad, hess = cost_state(x, t, cfg)
        for i in range(6):
            dx = np.zeros(6)
            dx[i] = eps
            vp = cost_state(x + dx, t, cfg)[0]
            vm = cost_state(x - dx, t, cfg)[0]
            fd = (vp - vm) / (2 * eps)
            assert abs(fd - grad[i]) < 1e-5 * max(1.0, abs(grad[i]))
            gp = cost_state(x + dx, t, cfg)[1][i]
            gm = cost_state(x - dx, t, cfg)[1][i]
            fd2 = (gp - gm) / (2 * eps)
            assert abs(fd2 - hess[i, i]) < 1e-4 * max(1.0, abs(hess[i, i]))


def test_cost_control_derivatives_match_fd():
    cfg = CostConfig()
    rng = np.random.default_rng(4)
    eps = 1e-6
    for _ in range(100):
        u = rng.uniform(-1, 1, 2)
        value, grad, hess = cost_control(u, cfg)
        for j in range(2):
            du = np.zeros(2)
            du[j] = eps
            fd = (cost_control(u + du, cfg)[0]
                  - cost_control(u - du, cfg)[0]) / (2 * eps)
            assert abs(fd - grad[j]) < 1e-5 * max(1.0, abs(grad[j]))
            fd2 = (cost_control(u + du, cfg)[1][j]
                   - cost_control(u - du, cfg)[1][j]) / (2 * eps)
            assert abs(fd2 - hess[j, j]) < 1e-4 * max(1.0, abs(hess[j, j]))


def test_cost_config_validation():
    with pytest.raises(ValidationError):
        CostConfig(state_weights=(1.0, 1.0))
    with pytest.raises(ValidationError):
        CostConfig(smooth_abs_width=0.0)
    with pytest.raises(ValidationError):
        CostConfig(state_weights=(1, 1, 1, 1, 1, -1))


# ---------------------------------------------------------------- iLQG


class _QuadCost:
    """Pure quadratic cost; makes iLQG equivalent to finite-horizon LQR."""

    def __init__(self, Q, R, Qf):
        self.Q, self.R, self.Qf = Q, R, Qf

    def running(self, x, u):
        return (0.5 * x @ self.Q @ x + 0.5 * u @ self.R @ u,
                self.Q @ x, self.R @ u, self.Q, self.R)

    def terminal(self, x):
        return 0.5 * x @ self.Qf @ x, self.Qf @ x, self.Qf


class _LinearDynamics:
    def __init__(self, A, B):
        self.A, self.B = A, B

    def step_batch(self, X, U):
        return X @ self.A.T + U @ self.B.T


def _lqr_oracle(A, B, Q, R, Qf, horizon):
    """Finite-horizon discrete Riccati recursion."""
    P = Qf.copy()
    gains = np.empty((horizon, B.shape[1], A.shape[0]))
    for k in reversed(range(horizon)):
        K = -np.linalg.solve(R + B.T @ P @ B, B.T @ P @ A)
        P = Q + A.T @ P @ (A + B @ K)
        P = 0.5 * (P + P.T)
        gains[k] = K
    return gains, P


def test_ilqg_matches_lqr():
    rng = np.random.default_rng(11)
    A = np.eye(6) + 0.04 * rng.standard_normal((6, 6))
    B = 0.15 * rng.standard_normal((6, 2))
    Q = np.diag([2.0, 1.0, 0.5, 0.5, 0.3, 0.3])
    R = np.diag([0.2, 0.3])
    Qf = 5.0 * Q
    horizon = 25
    x0 = 0.1 * rng.standard_normal(6)
    gains_ref, P0 = _lqr_oracle(A, B, Q, R, Qf, horizon)

    plan = ilqg(_LinearDynamics(A, B), _QuadCost(Q, R, Qf), x0,
                horizon=horizon, action_limit=None)
    assert plan.converged
    assert np.max(np.abs(plan.gains - gains_ref)) < 1e-8
    ref_cost = 0.5 * x0 @ P0 @ x0
    assert abs(plan.cost - ref_cost) < 1e-8 * max(1.0, ref_cost)
    # nominal actions equal the closed-form LQR policy along its own
    # trajectory (to the planner's convergence tolerance, not the
    # tighter pin on the Riccati gains above)
    x = x0.copy()
    for k in range(horizon):
        u_ref = gains_ref[k] @ x
        assert np.max(np.abs(plan.actions[k] - u_ref)) < 1e-7
        x = A @ x + B @ u_ref
    assert np.max(np.abs(plan.states[-1] - x)) < 1e-7


def test_ilqg_cost_trace_non_increasing():
    dyn = _dynamics(ring=1)
    target = np.array([np.pi / 4, 0, 0, 0, 0, 0])
    x0 = np.zeros(6)
    plan = ilqg(dyn, TargetCost(target), x0, horizon=30, max_iterations=30)
    assert np.all(np.diff(plan.cost_trace) <= 1e-12)
    assert plan.cost_trace[-1] < plan.cost_trace[0]


def test_ilqg_feedback_consistency():
    dyn = _dynamics(ring=1)
    target = np.array([np.pi / 4, 0, 0, 0, 0, 0])
    plan = ilqg(dyn, TargetCost(target), np.zeros(6), horizon=30,
                max_iterations=30)
    # tracking the plan from its own start reproduces the nominal
    x = plan.states[0].copy()
    for k in range(plan.horizon):
        u = plan.action(k, x)
        x = dyn.step(x, u)
        assert np.max(np.abs(state_error(x, plan.states[k + 1]))) < 1e-8


def test_ilqg_improves_over_passive():
    dyn = _dynamics(ring=1)
    target = np.array([np.pi / 4, 0, 0, 0, 0, 0])
    cost = TargetCost(target)
    x0 = np.zeros(6)
    plan = ilqg(dyn, cost, x0, horizon=30, max_iterations=30)
    passive = cost.trajectory_cost(simulate(dyn, x0, np.zeros((30, 2))),
                                   np.zeros((30, 2)))
    assert plan.cost < 0.75 * passive
    # and the planned trajectory actually arrives
    assert abs(angle_diff(plan.states[-1, 0], np.pi / 4)) < 0.1
    assert abs(plan.states[-1, 1]) < 0.5


def test_ilqg_converged_at_target():
    dyn = _dynamics(ring=1)
    target = np.zeros(6)
    plan = ilqg(dyn, TargetCost(target), np.zeros(6), horizon=15)
    assert plan.converged
    assert plan.cost < 1e-6
    assert np.max(np.abs(plan.actions)) < 1e-3


def test_ilqg_validation():
    dyn = _dynamics(ring=1)
    with pytest.raises(ValidationError):
        ilqg(dyn, TargetCost(np.zeros(6)), np.zeros(5))
    with pytest.raises(ValidationError):
        ilqg(dyn, TargetCost(np.zeros(6)), np.zeros(6), horizon=10,
             u_init=np.zeros((5, 2)))
    with pytest.raises(ValidationError):
        TargetCost(np.zeros(4))


def test_fd_jacobians_stable_under_step_halving():
    dyn = _dynamics(ring=1)
    rng = np.random.default_rng(7)
    xs = np.column_stack([
        rng.uniform(-np.pi, np.pi, 5), rng.uniform(-2, 2, 5),
        rng.uniform(-0.1, 0.1, 5), rng.uniform(-0.5, 0.5, 5),
        rng.uniform(-0.1, 0.1, 5), rng.uniform(-0.5, 0.5, 5)])
    xs = np.vstack([xs, np.zeros(6)])
    us = rng.uniform(-0.5, 0.5, (5, 2))
    A1, B1 = fd_jacobians(dyn, xs, us)
    A2, B2 = fd_jacobians(dyn, xs, us, fd_state=5e-5, fd_action=5e-4)
    assert np.max(np.abs(A1 - A2)) < 0.01 * max(1.0, np.max(np.abs(A1)))
    assert np.max(np.abs(B1 - B2)) < 0.01 * max(1.0, np.max(np.abs(B1)))


# ------------------------------------------------- learned dynamics


def test_learned_step_shares_rollout_code_path():
    dyn = _dynamics(ring=1)
    rng = np.random.default_rng(5)
    x = np.array([1.1, -0.8, 0.03, 0.2, -0.02, -0.1])
    u = np.array([0.4, -0.3])
    nxt = dyn.step(x, u)
    # identical platform columns through the rollout entry point must
    # give bitwise-identical ball predictions
    plat0, plat1 = dyn.platform_step_batch(x[None, 2:], u[None])
    window = np.empty((1, 2, 8))
    window[0, 0, :2] = x[:2]
    window[0, 0, 2:] = plat0[0]
    window[0, 1, :2] = 0.0
    window[0, 1, 2:] = plat1[0]
    pred, _ = rollout_batch(dyn.ball_model, window, dt=DT)
    assert np.array_equal(pred[0, 1], nxt[:2])
    assert np.array_equal(nxt[2:], plat1[0, :4])


def test_platform_step_matches_arx_recursion():
    # (tilt, rate) with a backward-difference rate is an exact
    # reparameterization of (y_k, y_{k-1}) under ARX(2, 1)
    arx = _platform_arx()
    dyn = _dynamics(ring=1)
    rng = np.random.default_rng(9)
    u = rng.uniform(-1, 1, 60)
    y = arx.simulate(u)
    k0 = arx.horizon
    for k in range(k0 + 1, 50):
        rate = (y[k] - y[k - 1]) / DT
        P = np.array([[y[k], rate, 0.0, 0.0]])
        # feed the command whose effect lands on this step
        U = np.array([[u[k + 1 - arx.delay], 0.0]])
        _, plat1 = dyn.platform_step_batch(P, U)
        assert abs(plat1[0, 0] - y[k + 1]) < 1e-12


def test_learned_dynamics_rejects_wrong_orders():
    arx_bad = ArxModel(n_a=1, n_b=1, delay=0, a=np.array([0.9]),
                       b=np.array([0.1]), residual_var=0.0)
    with pytest.raises(ValidationError):
        LearnedDynamics(_TrueModel(), arx_bad, arx_bad)


# ---------------------------------------------------------------- PD


def test_pd_zero_at_target():
    u = pd_action(0.7, 0.0, 0.7)
    assert np.allclose(u, 0.0)


def test_pd_accelerates_toward_target():
    # the commanded steady tilt must produce angular acceleration of the
    # same sign as the angular error, wherever the ball sits
    cfg = SIM_CFG
    for theta in np.linspace(-np.pi, np.pi, 17, endpoint=False):
        for err in (0.5, -0.5):
            target = wrap_angle(theta + err)
            u = pd_action(theta, 0.0, target)
            beta = cfg.actuator.tilt_gain * u[0]
            gamma = cfg.actuator.tilt_gain * u[1]
            accel = true_ball_accel(
                np.array([theta]), np.array([0.0]), np.array([beta]),
                np.array([0.0]), np.array([gamma]), np.array([0.0]),
                np.array([0.0]), ring_radius=GEO.ring_radii[0],
                gravity=cfg.gravity)[0]
            assert np.sign(accel) == np.sign(err)


def test_pd_respects_command_box():
    u = pd_action(0.0, -5.0, np.pi - 0.1, PdGains(position=50.0, rate=20.0))
    assert np.max(np.abs(u)) <= 1.0 + 1e-12


# ------------------------------------------------------- transitions


def _transition_trajectories(events, jitter=0.0, seed=0):
    """One single-crossing trajectory per (ring_a, ring_b, theta_a,
    theta_b) event."""
    rng = np.random.default_rng(seed)
    trajs = []
    for i, (ring_a, ring_b, th_a, th_b) in enumerate(events):
        rings = np.array([ring_a] * 3 + [ring_b] * 3)
        thetas = wrap_angle(np.array(
            [th_a + jitter * rng.standard_normal()] * 3
            + [th_b + jitter * rng.standard_normal()] * 3))
        zeros = np.zeros(6)
        trajs.append(Trajectory(
            t=np.arange(6) / 30.0, ring=rings, theta=thetas,
            theta_dot=zeros, beta=zeros, beta_dot=zeros, gamma=zeros,
            gamma_dot=zeros, u=np.zeros((6, 2)), trajectory_id=f"ev{i}"))
    return trajs


def test_clusters_single_gate():
    trajs = _transition_trajectories(
        [(1, 2, 1.0, 1.0)] * 6, jitter=0.02, seed=1)
    pairs = learn_transition_clusters(trajs, GEO)
    assert len(pairs) == 1
    p = pairs[0]
    assert p.outer_ring == 1 and p.inner_ring == 2
    assert abs(angle_diff(p.outer_theta, 1.0)) < 0.01
    assert abs(angle_diff(p.inner_theta, 1.0)) < 0.01
    assert p.n_events == 6
    # same angle both sides: the crossing direction is radially inward
    inward = -np.array([math.cos(p.outer_theta), math.sin(p.outer_theta)])
    assert np.allclose(p.direction, inward, atol=0.02)
    assert abs(np.linalg.norm(p.direction) - 1.0) < 1e-12


def test_clusters_split_by_angle_and_boundary():
    trajs = _transition_trajectories([
        (1, 2, 1.0, 1.0), (1, 2, -2.0, -2.0),
        (2, 3, 1.0, 1.0), (1, 2, 1.05, 1.05)])
    pairs = learn_transition_clusters(trajs, GEO)
    assert len(pairs) == 3
    by_ring = {}
    for p in pairs:
        by_ring.setdefault(p.outer_ring, []).append(p)
    assert len(by_ring[1]) == 2 and len(by_ring[2]) == 1
    near = [p for p in by_ring[1] if abs(angle_diff(p.outer_theta, 1.0)) < 0.1]
    assert near[0].n_events == 2  # 1.0 and 1.05 merge


def test_clusters_merge_both_directions():
    trajs = _transition_trajectories([(1, 2, 0.5, 0.55), (2, 1, 0.55, 0.5)])
    pairs = learn_transition_clusters(trajs, GEO)
    assert len(pairs) == 1
    assert pairs[0].n_events == 2
    assert pairs[0].outer_ring == 1


def test_clusters_empty():
    zeros = np.zeros(10)
    traj = Trajectory(t=np.arange(10) / 30.0, ring=np.ones(10, dtype=int),
                      theta=zeros, theta_dot=zeros, beta=zeros,
                      beta_dot=zeros, gamma=zeros, gamma_dot=zeros)
    assert learn_transition_clusters([traj], GEO) == []


def test_pairs_from_geometry_cover_all_boundaries():
    pairs = pairs_from_geometry(GEO)
    boundaries = {(p.outer_ring, p.inner_ring) for p in pairs}
    assert boundaries == {(r, r + 1) for r in range(1, GEO.n_rings)}
    for p in pairs:
        centres = GEO.inward_gates(p.outer_ring)
        assert min(abs(angle_diff(p.outer_theta, c)) for c in centres) < 1e-9


def _steady_gravity(u, gain):
    beta, gamma = gain * u[0], gain * u[1]
    return np.array([-math.sin(beta), -math.sin(gamma) * math.cos(beta)])


def test_transition_action_parallel_and_max_norm():
    trajs = _transition_trajectories([(1, 2, 0.8, 0.9)] * 3)
    pair = learn_transition_clusters(trajs, GEO)[0]
    act = SIM_CFG.actuator
    u = transition_action(pair, act)
    v = _steady_gravity(u, act.tilt_gain)
    cross = v[0] * pair.direction[1] - v[1] * pair.direction[0]
    assert abs(cross) < 1e-10
    assert v @ pair.direction > 0
    # largest admissible command: one component sits on the box boundary
    assert abs(np.max(np.abs(u)) - 1.0) < 1e-12


def test_transition_action_antisymmetry():
    trajs = _transition_trajectories([(2, 3, -1.3, -1.2)] * 3)
    pair = learn_transition_clusters(trajs, GEO)[0]
    act = SIM_CFG.actuator
    u_in = transition_action(pair, act, inward=True)
    u_out = transition_action(pair, act, inward=False)
    assert np.allclose(u_in, -u_out, atol=1e-12)


def test_transition_action_axis_aligned():
    from tiltmaze.control import ClusterPair
    act = SIM_CFG.actuator
    down = ClusterPair(outer_ring=1, inner_ring=2, outer_theta=-np.pi / 2,
                       inner_theta=-np.pi / 2,
                       direction=np.array([0.0, -1.0]), n_events=1)
    assert np.array_equal(transition_action(down, act),
                          np.array([0.0, 1.0]))
    left = ClusterPair(outer_ring=1, inner_ring=2, outer_theta=np.pi - 1e-9,
                       inner_theta=np.pi - 1e-9,
                       direction=np.array([1.0, 0.0]), n_events=1)
    assert np.array_equal(transition_action(left, act),
                          np.array([-1.0, 0.0]))
    # geometry-derived directions carry float dust off the axes; the
    # bisection path must still produce a parallel, box-boundary action
    for p in pairs_from_geometry(GEO):
        u = transition_action(p, act)
        v = _steady_gravity(u, act.tilt_gain)
        cross = v[0] * p.direction[1] - v[1] * p.direction[0]
        assert abs(cross) < 1e-10
        assert v @ p.direction > 0
        assert abs(np.max(np.abs(u)) - 1.0) < 1e-12


# ------------------------------------------------------ closed loop


def test_settling_metrics():
    t = np.arange(200) / 30.0
    theta = np.full(200, 0.5)
    theta[:60] = 2.0  # outside tolerance until sample 60
    settling, steady = settling_metrics(t, theta, 0.5, 0.1)
    assert np.isclose(settling, t[60])
    assert steady == 0.0
    never = np.full(200, 2.0)
    settling, _ = settling_metrics(t, never, 0.5, 0.1)
    assert math.isinf(settling)


def _fresh_sim(theta0, ring=1, seed=0):
    sim = MazeSimulator(seed=seed)
    sim.reset(FullState(ball=BallState(ring=ring, theta=theta0,
                                       theta_dot=0.0),
                        platform=PlatformState()), seed=seed)
    return sim


def test_reposition_ilqg_settles():
    sim = _fresh_sim(theta0=0.3)
    res = run_repositioning(sim, _dynamics(ring=1), shift=np.pi / 4,
                            duration=3.0)
    assert res.settled
    assert res.settling_time <= 2.5
    assert res.steady_error < GEO.ball_angular_size(1)


def test_reposition_handles_wrap():
    sim = _fresh_sim(theta0=3.0)
    res = run_repositioning(sim, _dynamics(ring=1), shift=np.pi / 4,
                            duration=3.0)
    assert res.settled
    assert abs(angle_diff(res.trajectory.theta[-1], res.target_theta)) \
        < GEO.ball_angular_size(1)


def test_pd_baseline_reaches_target_but_hunts():
    # plain PD fights a 6-sample actuation delay: it reaches the target
    # quickly, then hunts around it instead of settling. The planned
    # controller is what actually settles; PD only has to stay bounded.
    sim = _fresh_sim(theta0=0.3)
    res = run_repositioning(sim, None, shift=np.pi / 4, duration=4.0,
                            controller="pd")
    tr = res.trajectory
    err = np.abs(angle_diff(tr.theta, res.target_theta))
    assert err[:45].min() < 0.05
    assert err.max() < 2.2
    assert np.all(np.unique(tr.ring) == 1)
    assert np.nanmax(np.abs(tr.u)) <= 1.0 + 1e-12


def test_navigate_one_ring():
    sim = _fresh_sim(theta0=2.5, ring=1, seed=3)
    models = {1: _TrueModel(ring=1), 2: _TrueModel(ring=2)}
    arx = _platform_arx()
    nav = NavigatorConfig(goal_ring=2, total_timeout=20.0,
                          segment_timeout=8.0, horizon=30,
                          max_plan_iterations=25)
    log = navigate_maze(sim, models, arx, arx, clusters=[], config=nav)
    assert log.success
    assert log.final_ring == 2
    assert log.elapsed < 20.0
    assert any(seg.outcome == "transition" for seg in log.segments)
    assert len(log.trajectory) == round(log.elapsed / DT) + 1
