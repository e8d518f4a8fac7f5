"""Angle arithmetic on the half-open interval [-pi, pi)."""

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_angle(angle):
    """Wrap an angle (scalar or array, radians) into [-pi, pi).

    The mapping subtracts an integer multiple of 2*pi, so wrapped and raw
    angles always differ by k*2*pi exactly (up to floating-point rounding).
    """
    angle = np.asarray(angle, dtype=float)
    if not np.all(np.isfinite(angle)):
        raise ValueError("wrap_angle requires finite input")
    wrapped = np.mod(angle + np.pi, TWO_PI) - np.pi
    # np.mod can return TWO_PI for inputs a hair below a wrap point; fold back.
    wrapped = np.where(wrapped >= np.pi, wrapped - TWO_PI, wrapped)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


def angle_diff(a, b):
    """Shortest signed angular difference a - b, in [-pi, pi)."""
    return wrap_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
