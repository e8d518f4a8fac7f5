"""Turning raw logs into per-ring training and test sets."""
import math
import warnings

import numpy as np

from ..core import (RegressionDataset, Trajectory, TransitionDataset,
                    ValidationError, angle_diff)
from .filtering import acausal_accel, kalman_velocity

# samples on each side of a ring change that are dropped from datasets;
# the contact impulse there is not described by single-ring dynamics
_TRANSITION_GUARD = 2


def process_trajectory(traj, theta_process_var=25.0, theta_meas_var=4e-6,
                       tilt_process_var=25.0, tilt_meas_var=1e-6,
                       cutoff_hz=5.0):
    """Estimate velocities and acceleration targets for a raw log.

    The ball angle and both tilts are run through causal constant-velocity
    Kalman filters; accelerations come from zero-phase differentiation of
    the filtered rates, which is only valid offline.
    """
    dt = traj.dt
    theta, theta_dot = kalman_velocity(traj.theta, dt, theta_process_var,
                                       theta_meas_var)
    beta, beta_dot = kalman_velocity(traj.beta, dt, tilt_process_var,
                                     tilt_meas_var, wrap=False)
    gamma, gamma_dot = kalman_velocity(traj.gamma, dt, tilt_process_var,
                                       tilt_meas_var, wrap=False)
    return Trajectory(
        t=traj.t, ring=traj.ring, theta=theta, theta_dot=theta_dot,
        beta=beta, beta_dot=beta_dot, gamma=gamma, gamma_dot=gamma_dot,
        beta_ddot=acausal_accel(beta_dot, dt, cutoff_hz),
        gamma_ddot=acausal_accel(gamma_dot, dt, cutoff_hz),
        u=traj.u, theta_ddot=acausal_accel(theta_dot, dt, cutoff_hz),
        trajectory_id=traj.trajectory_id)


def _transition_guard_mask(traj):
    """True where a row is clear of every ring-change neighborhood."""
    keep = np.ones(len(traj), dtype=bool)
    for k in traj.transition_indices():
        lo = max(0, k - _TRANSITION_GUARD)
        hi = min(len(traj), k + _TRANSITION_GUARD + 2)
        keep[lo:hi] = False
    return keep


def _downsample_coeff(n_rows, max_rows):
    if n_rows <= max_rows:
        return 1
    return math.ceil(n_rows / max_rows)


def _split_and_downsample(order_key, max_rows):
    """Indices of the train (downsampled) and test halves of a row list."""
    n = len(order_key)
    half = n // 2
    train = np.arange(half)
    c = _downsample_coeff(half, max_rows)
    return train[::c], np.arange(half, n), c


def build_datasets(trajectories, geometry, max_rows=5000):
    """Per-ring (train, test) regression sets from processed trajectories.

    Rows keep their temporal order; each ring's rows are split in half,
    train first, and only the training half is uniformly downsampled with
    the smallest coefficient that brings it under max_rows.
    """
    _require_trajectories(trajectories)
    out = {}
    for ring in range(1, geometry.n_rings + 1):
        ts, inputs, targets, us, ids = [], [], [], [], []
        for traj in trajectories:
            aug = traj.augmented_inputs()
            mask = (traj.ring == ring) & _transition_guard_mask(traj)
            mask &= np.all(np.isfinite(aug), axis=1)
            mask &= np.isfinite(traj.theta_ddot)
            if not mask.any():
                continue
            ts.append(traj.t[mask])
            inputs.append(aug[mask])
            targets.append(traj.theta_ddot[mask])
            us.append(traj.u[mask])
            ids.append(traj.trajectory_id)
        if not ts:
            warnings.warn(f"ring {ring} has no usable rows", stacklevel=2)
            empty = RegressionDataset(ring, np.empty(0), np.empty((0, 8)),
                                      np.empty(0))
            out[ring] = (empty, empty)
            continue
        t = np.concatenate(ts)
        X = np.vstack(inputs)
        y = np.concatenate(targets)
        u = np.vstack(us)
        tr, te, _ = _split_and_downsample(t, max_rows)
        out[ring] = (
            RegressionDataset(ring, t[tr], X[tr], y[tr], u[tr], tuple(ids)),
            RegressionDataset(ring, t[te], X[te], y[te], u[te], tuple(ids)),
        )
    return out


def build_transition_data(trajectories, geometry, max_rows=5000):
    """Per-ring (train, test) one-step transition sets at the sample rate.

    A usable pair is two consecutive samples in the same ring, outside the
    transition guard, with a recorded command and finite filtered states.
    """
    _require_trajectories(trajectories)
    out = {}
    for ring in range(1, geometry.n_rings + 1):
        ts, inputs, deltas, ids = [], [], [], []
        for traj in trajectories:
            state = np.column_stack([traj.theta, traj.theta_dot, traj.beta,
                                     traj.beta_dot, traj.gamma, traj.gamma_dot])
            guard = _transition_guard_mask(traj)
            pair = (traj.ring[:-1] == ring) & (traj.ring[1:] == ring)
            pair &= guard[:-1] & guard[1:]
            pair &= np.all(np.isfinite(state[:-1]), axis=1)
            pair &= np.all(np.isfinite(state[1:]), axis=1)
            pair &= np.all(np.isfinite(traj.u[:-1]), axis=1)
            if not pair.any():
                continue
            k = np.nonzero(pair)[0]
            ts.append(traj.t[k])
            inputs.append(np.hstack([state[k], traj.u[k]]))
            deltas.append(np.column_stack([
                angle_diff(traj.theta[k + 1], traj.theta[k]),
                traj.theta_dot[k + 1] - traj.theta_dot[k]]))
            ids.append(traj.trajectory_id)
        if not ts:
            warnings.warn(f"ring {ring} has no usable transitions",
                          stacklevel=2)
            empty = TransitionDataset(ring, np.empty(0), np.empty((0, 8)),
                                      np.empty((0, 2)))
            out[ring] = (empty, empty)
            continue
        t = np.concatenate(ts)
        X = np.vstack(inputs)
        d = np.vstack(deltas)
        tr, te, _ = _split_and_downsample(t, max_rows)
        out[ring] = (TransitionDataset(ring, t[tr], X[tr], d[tr], tuple(ids)),
                     TransitionDataset(ring, t[te], X[te], d[te], tuple(ids)))
    return out


def _require_trajectories(trajectories):
    if not trajectories:
        raise ValidationError("need at least one trajectory")
    for traj in trajectories:
        if not isinstance(traj, Trajectory):
            raise ValidationError("expected Trajectory instances")
