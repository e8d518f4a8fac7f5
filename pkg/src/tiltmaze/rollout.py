"""Multi-step forward prediction and the evaluation metrics built on it.

Continuous models predict ball acceleration and are integrated with RK4 at
the sample period, conditioning on the recorded platform signals. The
discrete model iterates its one-sample delta map directly.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ValidationError, angle_diff, wrap_angle

DT = 1.0 / 30.0


@dataclass(frozen=True, eq=False)
class RolloutResult:
    predicted: np.ndarray        # (n+1, 2) theta, theta_dot
    truth: np.ndarray            # (n+1, 2)
    abs_err_theta: np.ndarray    # (n+1,), shortest-arc magnitude
    abs_err_theta_dot: np.ndarray
    pred_std: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (len(self.predicted) == len(self.truth)
                == len(self.abs_err_theta) == len(self.abs_err_theta_dot)):
            raise ValidationError("rollout result lengths differ")


def _wrap_cols(theta, theta_dot, platform):
    return np.column_stack([wrap_angle(theta), theta_dot, platform])


def ball_step(model, theta, theta_dot, plat0, plat1, dt=DT):
    """One RK4 step of the ball under a learned acceleration model.

    plat0 and plat1 are the platform columns (beta, beta_dot, gamma,
    gamma_dot, beta_ddot, gamma_ddot) at the step endpoints; stages see
    their linear interpolation. Shared by multi-step rollouts and the
    one-step dynamics used for planning.
    """
    mid = 0.5 * (plat0 + plat1)
    h = dt
    k1v = np.asarray(model.predict(_wrap_cols(theta, theta_dot, plat0)))
    th2 = theta + 0.5 * h * theta_dot
    td2 = theta_dot + 0.5 * h * k1v
    k2v = np.asarray(model.predict(_wrap_cols(th2, td2, mid)))
    th3 = theta + 0.5 * h * td2
    td3 = theta_dot + 0.5 * h * k2v
    k3v = np.asarray(model.predict(_wrap_cols(th3, td3, mid)))
    th4 = theta + h * td3
    td4 = theta_dot + h * k3v
    k4v = np.asarray(model.predict(_wrap_cols(th4, td4, plat1)))
    theta_new = wrap_angle(theta + (h / 6.0)
                           * (theta_dot + 2 * td2 + 2 * td3 + td4))
    theta_dot_new = theta_dot + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
    return theta_new, theta_dot_new


def rollout_batch(model, windows, dt=DT, with_std=False):
    """Integrate a continuous acceleration model over a batch of windows.

    windows: (B, n+1, 8) matrices in augmented-input column order; ball
    columns beyond index 0 supply the truth, platform columns drive the
    prediction (linearly interpolated inside each RK4 step).

    Returns (pred, std): pred is (B, n+1, 2); std is (B, n+1) one-shot
    acceleration standard deviations at the visited states (None unless
    requested).
    """
    W = np.asarray(windows, dtype=float)
    if W.ndim != 3 or W.shape[2] != 8:
        raise ValidationError("windows must have shape (B, n+1, 8)")
    B, n1, _ = W.shape
    pred = np.empty((B, n1, 2))
    std = np.empty((B, n1)) if with_std else None
    theta = W[:, 0, 0].copy()
    theta_dot = W[:, 0, 1].copy()
    pred[:, 0, 0] = theta
    pred[:, 0, 1] = theta_dot

    for k in range(n1 - 1):
        if with_std:
            _, s = model.predict(_wrap_cols(theta, theta_dot, W[:, k, 2:]),
                                 return_std=True)
            std[:, k] = s
        theta, theta_dot = ball_step(model, theta, theta_dot,
                                     W[:, k, 2:], W[:, k + 1, 2:], dt)
        pred[:, k + 1, 0] = theta
        pred[:, k + 1, 1] = theta_dot

    if with_std:
        _, s = model.predict(_wrap_cols(theta, theta_dot, W[:, -1, 2:]),
                             return_std=True)
        std[:, -1] = s
    return pred, std


def rollout(model, window, dt=DT, with_std=False):
    """Single-window rollout returning a RolloutResult."""
    W = np.asarray(window, dtype=float)
    if W.ndim != 2 or W.shape[1] != 8:
        raise ValidationError("window must have shape (n+1, 8)")
    pred, std = rollout_batch(model, W[None], dt=dt, with_std=with_std)
    return _as_result(pred[0], W[:, :2], std[0] if with_std else None)


def rollout_npd_batch(model, windows):
    """Iterate the discrete delta map over (B, n+1, 8) transition windows.

    Columns follow the transition-input order: ball state, tilts with
    rates, then the commands; tilt and command columns are teacher-forced
    from the recorded data, mirroring the platform conditioning of the
    continuous models.
    """
    W = np.asarray(windows, dtype=float)
    if W.ndim != 3 or W.shape[2] != 8:
        raise ValidationError("windows must have shape (B, n+1, 8)")
    B, n1, _ = W.shape
    pred = np.empty((B, n1, 2))
    theta = W[:, 0, 0].copy()
    theta_dot = W[:, 0, 1].copy()
    pred[:, 0, 0] = theta
    pred[:, 0, 1] = theta_dot
    for k in range(n1 - 1):
        X = np.column_stack([wrap_angle(theta), theta_dot, W[:, k, 2:]])
        delta = np.asarray(model.predict(X))
        theta = wrap_angle(theta + delta[:, 0])
        theta_dot = theta_dot + delta[:, 1]
        pred[:, k + 1, 0] = theta
        pred[:, k + 1, 1] = theta_dot
    return pred


def rollout_npd(model, window):
    W = np.asarray(window, dtype=float)
    if W.ndim != 2 or W.shape[1] != 8:
        raise ValidationError("window must have shape (n+1, 8)")
    pred = rollout_npd_batch(model, W[None])
    return _as_result(pred[0], W[:, :2], None)


def _as_result(pred, truth, std):
    return RolloutResult(
        predicted=pred, truth=truth,
        abs_err_theta=np.abs(angle_diff(pred[:, 0], truth[:, 0])),
        abs_err_theta_dot=np.abs(pred[:, 1] - truth[:, 1]),
        pred_std=std)


def mean_abs_errors(pred, truth):
    """Per-step mean absolute errors over a batch: (theta, theta_dot)."""
    e_th = np.abs(angle_diff(pred[..., 0], truth[..., 0]))
    e_td = np.abs(pred[..., 1] - truth[..., 1])
    return e_th.mean(axis=0), e_td.mean(axis=0)


def nrmse(pred, truth):
    """Root-mean-square error normalized by the truth's standard deviation."""
    p = np.asarray(pred, dtype=float)
    t = np.asarray(truth, dtype=float)
    if p.shape != t.shape or p.ndim != 1 or len(p) == 0:
        raise ValidationError("pred and truth must be equal-length 1-d arrays")
    scale = float(np.std(t))
    if scale == 0.0:
        raise ValidationError("truth has zero variance; nRMSE is undefined")
    return float(np.sqrt(np.mean((p - t) ** 2)) / scale)


def select_gate_windows(trajectories, geometry, n=40):
    """Non-overlapping n-step single-ring windows that end inside a gate span.

    Returns a list of (trajectory_index, start_index) pairs. The final
    sample's angle must lie within the angular span of an opening adjacent
    to the window's ring, on either side of its wall.
    """
    hits = []
    for ti, traj in enumerate(trajectories):
        aug_ok = np.all(np.isfinite(traj.augmented_inputs()), axis=1)
        k = 0
        while k + n < len(traj):
            ring = int(traj.ring[k])
            seg = slice(k, k + n + 1)
            if (np.all(traj.ring[seg] == ring) and np.all(aug_ok[seg])):
                th_end = traj.theta[k + n]
                near_gate = (
                    geometry.in_gate_span(ring, th_end, inward=True) is not None
                    or geometry.in_gate_span(ring, th_end, inward=False)
                    is not None)
                if near_gate:
                    hits.append((ti, k))
                    k += n + 1
                    continue
            k += 1
    return hits


def window_matrix(traj, start, n, columns="augmented"):
    """Extract an (n+1, 8) window in augmented or transition column order."""
    seg = slice(start, start + n + 1)
    if columns == "augmented":
        return traj.augmented_inputs()[seg]
    if columns == "transition":
        state = np.column_stack([traj.theta, traj.theta_dot, traj.beta,
                                 traj.beta_dot, traj.gamma, traj.gamma_dot])
        return np.hstack([state[seg], traj.u[seg]])
    raise ValidationError(f"unknown column layout {columns!r}")


def learning_curve(kind, train, test, sizes, basis, **fit_settings):
    """Train/test one-step nRMSE as the training set grows.

    Each size refits on the temporally-first rows of the training set.
    Returns a list of {size, train_nrmse, test_nrmse} records.
    """
    from .gp import fit_model

    sizes = [int(s) for s in sizes]
    if sizes != sorted(sizes) or (sizes and sizes[0] <= 0):
        raise ValidationError("sizes must be positive and ascending")
    if sizes and sizes[-1] > len(train):
        raise ValidationError("size exceeds available training rows")
    records = []
    for size in sizes:
        X, y = train.inputs[:size], train.targets[:size]
        model = fit_model(kind, X, y, basis, **fit_settings)
        records.append({
            "size": size,
            "train_nrmse": nrmse(model.predict(X), y),
            "test_nrmse": nrmse(model.predict(test.inputs), test.targets),
        })
    return records
