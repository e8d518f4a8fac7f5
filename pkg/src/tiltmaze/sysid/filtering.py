"""State estimation filters: causal velocity estimation, acausal targets."""
import numpy as np
from scipy.signal import butter, filtfilt

from ..core import ValidationError, wrap_angle


def kalman_velocity(positions, dt, process_var, meas_var, wrap=True):
    """Causal constant-velocity Kalman filter over an angle sequence.

    Innovations are wrapped so crossings of the +-pi seam do not register
    as jumps. Returns (filtered positions, velocities).
    """
    z = np.asarray(positions, dtype=float)
    if z.ndim != 1 or len(z) == 0:
        raise ValidationError("positions must be a non-empty 1-d sequence")
    if dt <= 0 or process_var <= 0 or meas_var <= 0:
        raise ValidationError("dt, process_var and meas_var must be positive")

    F = np.array([[1.0, dt], [0.0, 1.0]])
    Q = process_var * np.array([[dt ** 3 / 3, dt ** 2 / 2],
                                [dt ** 2 / 2, dt]])
    H = np.array([1.0, 0.0])
    x = np.array([z[0], 0.0])
    P = np.diag([meas_var, 10.0])

    pos = np.empty_like(z)
    vel = np.empty_like(z)
    for k in range(len(z)):
        if k > 0:
            x = F @ x
            P = F @ P @ F.T + Q
        innov = z[k] - x[0]
        if wrap:
            innov = wrap_angle(innov)
        S = P[0, 0] + meas_var
        K = P[:, 0] / S
        x = x + K * innov
        P = P - np.outer(K, P[0, :])
        pos[k] = wrap_angle(x[0]) if wrap else x[0]
        vel[k] = x[1]
        # keep the internal state near the seam consistent with the output
        x[0] = pos[k]
    return pos, vel


def acausal_accel(velocities, dt, cutoff_hz=5.0):
    """Zero-phase acceleration targets from a velocity sequence.

    Central differences followed by a forward-backward second-order
    Butterworth low-pass, so the result has no group delay.
    """
    v = np.asarray(velocities, dtype=float)
    if v.ndim != 1 or len(v) < 7:
        raise ValidationError(
            "need at least 7 velocity samples for acausal differentiation")
    if dt <= 0:
        raise ValidationError("dt must be positive")
    wn = 2.0 * cutoff_hz * dt
    if not 0.0 < wn < 1.0:
        raise ValidationError("cutoff_hz must be below the Nyquist frequency")
    raw = np.gradient(v, dt)
    b, a = butter(2, wn)
    return filtfilt(b, a, raw, padlen=min(9, len(raw) - 2))
