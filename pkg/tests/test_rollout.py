import numpy as np
import pytest
from scipy.integrate import solve_ivp

from tiltmaze.core import (MazeGeometry, RegressionDataset, Trajectory,
                           ValidationError, angle_diff, wrap_angle)
from tiltmaze.physics import BasisConfig
from tiltmaze.rollout import (RolloutResult, learning_curve, mean_abs_errors,
                              nrmse, rollout, rollout_batch, rollout_npd,
                              rollout_npd_batch, select_gate_windows,
                              window_matrix)
from tiltmaze.sim.dynamics import true_ball_accel

GEOM = MazeGeometry()
RADIUS = GEOM.ring_radius(1)
DT = 1.0 / 30.0
FRICTION = dict(viscous_coeff=0.8, dry_coeff=0.35, dry_smoothing=0.05)
# the smoothed dry-friction term has a near-kink at theta_dot=0 that any
# fixed-step integrator resolves poorly; multi-step accuracy checks use the
# smooth variant so they measure pure truncation error
VISCOUS_ONLY = dict(viscous_coeff=0.8, dry_coeff=0.0, dry_smoothing=0.05)


class TrueAccelModel:
    """Ground-truth acceleration in the learned-model interface."""

    def __init__(self, friction=FRICTION):
        self.friction = friction

    def predict(self, X, return_std=False):
        X = np.atleast_2d(X)
        a = true_ball_accel(X[:, 0], X[:, 1], X[:, 2], X[:, 3], X[:, 4],
                            X[:, 5], X[:, 6], RADIUS, **self.friction)
        return (a, np.zeros(len(X))) if return_std else a


def _linear_platform_window(n, dt=DT, beta0=0.05, beta_rate=0.002,
                            gamma0=-0.03, gamma_rate=0.001):
    """Window whose platform columns are exactly linear in time.

    Linear interpolation inside the integrator is then exact, so the only
    rollout error is RK4 truncation, measurable against a stiff-tolerance
    reference integration.
    """
    t = np.arange(n + 1) * dt
    W = np.zeros((n + 1, 8))
    W[:, 2] = beta0 + beta_rate * t
    W[:, 3] = beta_rate
    W[:, 4] = gamma0 + gamma_rate * t
    W[:, 5] = gamma_rate
    return t, W


def _reference_solution(theta0, theta_dot0, t, beta0, beta_rate, gamma0,
                        gamma_rate, friction=FRICTION):
    def deriv(tt, y):
        return [y[1], true_ball_accel(
            y[0], y[1], beta0 + beta_rate * tt, beta_rate,
            gamma0 + gamma_rate * tt, gamma_rate, 0.0, RADIUS, **friction)]

    sol = solve_ivp(deriv, (t[0], t[-1]), [theta0, theta_dot0], t_eval=t,
                    rtol=1e-12, atol=1e-12)
    return sol.y.T


def test_rollout_matches_reference_integration():
    t, W = _linear_platform_window(40)
    W[0, 0], W[0, 1] = 0.4, 3.0
    ref = _reference_solution(0.4, 3.0, t, 0.05, 0.002, -0.03, 0.001,
                              friction=VISCOUS_ONLY)
    W[:, 0] = wrap_angle(ref[:, 0])
    W[:, 1] = ref[:, 1]
    result = rollout(TrueAccelModel(VISCOUS_ONLY), W)
    assert result.abs_err_theta[0] == 0.0
    # accumulated RK4 truncation at h=1/30 over 40 steps of ~14 rad/s^2 swings
    assert result.abs_err_theta.max() < 2e-6
    assert result.abs_err_theta_dot.max() < 5e-6


def test_one_step_error_vanishes_with_step_size():
    errs = []
    for dt in (DT, DT / 2, DT / 4):
        t, W = _linear_platform_window(1, dt=dt)
        W[0, 0], W[0, 1] = 1.0, 2.0
        ref = _reference_solution(1.0, 2.0, t, 0.05, 0.002, -0.03, 0.001)
        pred, _ = rollout_batch(TrueAccelModel(), W[None], dt=dt)
        errs.append(abs(angle_diff(pred[0, 1, 0], ref[1, 0])))
    assert errs[0] < 1e-8
    assert errs[1] < errs[0] / 4
    assert errs[2] < errs[1] / 4


def test_zero_step_window_is_initial_condition():
    W = np.zeros((1, 8))
    W[0, 0], W[0, 1] = 0.7, -1.2
    result = rollout(TrueAccelModel(), W)
    np.testing.assert_array_equal(result.predicted, [[0.7, -1.2]])
    np.testing.assert_array_equal(result.abs_err_theta, [0.0])
    np.testing.assert_array_equal(result.abs_err_theta_dot, [0.0])


def test_rollout_records_one_shot_std():
    t, W = _linear_platform_window(5)
    result = rollout(TrueAccelModel(), W, with_std=True)
    assert result.pred_std.shape == (6,)
    np.testing.assert_array_equal(result.pred_std, 0.0)


def test_rollout_batch_agrees_with_single_windows():
    rng = np.random.default_rng(0)
    windows = []
    for _ in range(3):
        _, W = _linear_platform_window(10)
        W[0, 0], W[0, 1] = rng.uniform(-3, 3), rng.uniform(-4, 4)
        windows.append(W)
    batch, _ = rollout_batch(TrueAccelModel(), np.stack(windows))
    for i, W in enumerate(windows):
        single = rollout(TrueAccelModel(), W)
        np.testing.assert_array_equal(batch[i], single.predicted)


class StubDelta:
    def __init__(self, delta):
        self.delta = np.asarray(delta, dtype=float)

    def predict(self, X, return_std=False):
        X = np.atleast_2d(X)
        d = np.tile(self.delta, (len(X), 1))
        return (d, np.zeros_like(d)) if return_std else d


def test_npd_zero_delta_holds_state():
    W = np.zeros((8, 8))
    W[0, 0], W[0, 1] = 0.3, 1.5
    result = rollout_npd(StubDelta([0.0, 0.0]), W)
    # wrap arithmetic may perturb theta by an ulp per step
    np.testing.assert_allclose(result.predicted[:, 0], 0.3, atol=1e-12)
    np.testing.assert_array_equal(result.predicted[:, 1], 1.5)


def test_npd_single_step_equals_predict_call():
    W = np.zeros((2, 8))
    W[0, 0], W[0, 1] = 0.2, -0.4
    result = rollout_npd(StubDelta([0.05, -0.1]), W)
    assert result.predicted[1, 0] == pytest.approx(0.25)
    assert result.predicted[1, 1] == pytest.approx(-0.5)


def test_npd_wraps_accumulated_angle():
    W = np.zeros((200, 8))
    W[0, 0] = 3.0
    pred = rollout_npd_batch(StubDelta([0.1, 0.0]), W[None])
    assert np.all(pred[0, :, 0] >= -np.pi)
    assert np.all(pred[0, :, 0] < np.pi)


# -- nRMSE ------------------------------------------------------------------------


def test_nrmse_identities():
    rng = np.random.default_rng(1)
    t = rng.normal(size=200)
    assert nrmse(t, t) == 0.0
    assert nrmse(np.full_like(t, t.mean()), t) == pytest.approx(1.0)
    c = 0.37
    assert nrmse(t + c, t) == pytest.approx(c / np.std(t))


def test_nrmse_shift_invariance_up_to_scale():
    rng = np.random.default_rng(2)
    t = rng.normal(size=100)
    p = t + rng.normal(size=100) * 0.3
    c = 5.0
    lhs = nrmse(p + c, t + c) * np.std(t + c)
    rhs = nrmse(p, t) * np.std(t)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_nrmse_rejects_degenerate_inputs():
    with pytest.raises(ValidationError):
        nrmse(np.ones(5), np.ones(5))  # zero variance
    with pytest.raises(ValidationError):
        nrmse(np.ones(5), np.ones(6))
    with pytest.raises(ValidationError):
        nrmse(np.empty(0), np.empty(0))


def test_rollout_errors_use_shortest_arc():
    pred = np.array([[3.1, 0.0], [-3.1, 0.0]])
    truth = np.array([[-3.1, 0.0], [3.1, 0.0]])
    e_th, _ = mean_abs_errors(pred[None], truth[None])
    expected = abs(angle_diff(3.1, -3.1))
    np.testing.assert_allclose(e_th, expected)
    assert np.all(e_th <= np.pi)


# -- gate window selection --------------------------------------------------------


def _parked_trajectory(theta, ring, n_samples, trajectory_id="parked"):
    n = n_samples
    return Trajectory(
        t=np.arange(n) * DT, ring=np.full(n, ring),
        theta=np.full(n, theta), theta_dot=np.zeros(n),
        beta=np.zeros(n), beta_dot=np.zeros(n), gamma=np.zeros(n),
        gamma_dot=np.zeros(n), beta_ddot=np.zeros(n), gamma_ddot=np.zeros(n),
        u=np.zeros((n, 2)), theta_ddot=np.zeros(n),
        trajectory_id=trajectory_id)


def test_windows_found_when_parked_in_gate():
    gate = GEOM.inward_gates(1)[0]
    traj = _parked_trajectory(gate, ring=1, n_samples=101)
    hits = select_gate_windows([traj], GEOM, n=5)
    assert len(hits) == 16  # greedy non-overlapping stride of n+1
    starts = [k for _, k in hits]
    assert starts == list(range(0, 91, 6))


def test_no_windows_far_from_gates():
    gates = GEOM.inward_gates(2) + GEOM.outward_gates(2)
    # park halfway between two adjacent gate centres
    ordered = np.sort(wrap_angle(np.asarray(gates)))
    theta = wrap_angle(0.5 * (ordered[0] + ordered[1]))
    assert GEOM.in_gate_span(2, theta) is None
    traj = _parked_trajectory(theta, ring=2, n_samples=300)
    assert select_gate_windows([traj], GEOM, n=40) == []


def test_windows_never_straddle_ring_changes():
    gate = GEOM.inward_gates(1)[0]
    a = _parked_trajectory(gate, 1, 120)
    ring = a.ring.copy()
    ring[60:] = 2
    mixed = Trajectory(t=a.t, ring=ring, theta=a.theta, theta_dot=a.theta_dot,
                       beta=a.beta, beta_dot=a.beta_dot, gamma=a.gamma,
                       gamma_dot=a.gamma_dot, beta_ddot=a.beta_ddot,
                       gamma_ddot=a.gamma_ddot, u=a.u, theta_ddot=a.theta_ddot)
    hits = select_gate_windows([mixed], GEOM, n=40)
    for _, k in hits:
        assert len(set(mixed.ring[k:k + 41])) == 1


def test_window_matrix_layouts():
    traj = _parked_trajectory(0.5, 3, 50)
    aug = window_matrix(traj, 4, 10, columns="augmented")
    np.testing.assert_array_equal(aug, traj.augmented_inputs()[4:15])
    trans = window_matrix(traj, 4, 10, columns="transition")
    np.testing.assert_array_equal(trans[:, :6], aug[:, :6])
    np.testing.assert_array_equal(trans[:, 6:], traj.u[4:15])
    with pytest.raises(ValidationError):
        window_matrix(traj, 0, 5, columns="bogus")


# -- learning curves --------------------------------------------------------------


def _toy_regression_set(ring, n, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 8)) * [1.5, 4, 0.1, 1, 0.1, 1, 10, 10]
    from tiltmaze.physics import features
    y = features(X, BasisConfig(ring_radius=GEOM.ring_radius(ring))).sum(axis=1)
    y = y + 0.1 * rng.normal(size=n)
    return RegressionDataset(ring, np.arange(n) * DT, X, y)


def test_learning_curve_full_size_matches_single_fit():
    train = _toy_regression_set(1, 60, 3)
    test = _toy_regression_set(1, 40, 4)
    basis = BasisConfig(ring_radius=RADIUS)
    records = learning_curve("P", train, test, [20, 60], basis)
    assert [r["size"] for r in records] == [20, 60]
    from tiltmaze.gp import fit_model
    full = fit_model("P", train.inputs, train.targets, basis)
    assert records[-1]["test_nrmse"] == pytest.approx(
        nrmse(full.predict(test.inputs), test.targets))
    # physics-only ignores training size, so train nRMSE is size-independent
    assert records[0]["train_nrmse"] == pytest.approx(
        nrmse(full.predict(train.inputs[:20]), train.targets[:20]))


def test_learning_curve_validates_sizes():
    train = _toy_regression_set(1, 30, 5)
    test = _toy_regression_set(1, 10, 6)
    basis = BasisConfig(ring_radius=RADIUS)
    with pytest.raises(ValidationError):
        learning_curve("P", train, test, [20, 10], basis)
    with pytest.raises(ValidationError):
        learning_curve("P", train, test, [10, 50], basis)


def test_rollout_result_length_validation():
    with pytest.raises(ValidationError):
        RolloutResult(predicted=np.zeros((3, 2)), truth=np.zeros((2, 2)),
                      abs_err_theta=np.zeros(3), abs_err_theta_dot=np.zeros(3))


def test_rollout_input_shape_validation():
    with pytest.raises(ValidationError):
        rollout(TrueAccelModel(), np.zeros((5, 7)))
    with pytest.raises(ValidationError):
        rollout_batch(TrueAccelModel(), np.zeros((5, 8)))
    with pytest.raises(ValidationError):
        rollout_npd(StubDelta([0, 0]), np.zeros((4, 4, 8)))
