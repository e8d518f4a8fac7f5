"""Continuous-time plant equations: ball channel dynamics and servo lag.

``true_ball_accel`` is the ground-truth angular acceleration including
friction.  It is written out longhand on purpose, independent of the feature
basis in :mod:`..physics`, so the two routes can be checked against each
other.
"""

import numpy as np


def true_ball_accel(theta, theta_dot, beta, beta_dot, gamma, gamma_dot,
                    beta_ddot, ring_radius, gravity=9.81,
                    viscous_coeff=0.0, dry_coeff=0.0, dry_smoothing=0.05):
    """Angular acceleration of the ball along its channel (vectorized).

    Rigid-body terms plus viscous friction ``-c_v * theta_dot`` and smoothed
    dry friction ``-c_d * tanh(theta_dot / eps)``.
    """
    sin_th = np.sin(theta)
    cos_th = np.cos(theta)
    cos_ga = np.cos(gamma)
    g_r = gravity / ring_radius
    accel = (
        beta_ddot * np.sin(gamma)
        - beta_dot ** 2 * sin_th * cos_ga ** 2 * cos_th
        + 2.0 * beta_dot * gamma_dot * cos_ga
        - 2.0 * beta_dot * gamma_dot * cos_ga * cos_th ** 2
        + 0.5 * gamma_dot ** 2 * np.sin(2.0 * theta)
        + g_r * np.sin(beta) * sin_th
        - g_r * np.sin(gamma) * np.cos(beta) * cos_th
    )
    if viscous_coeff or dry_coeff:
        accel = accel - viscous_coeff * theta_dot \
            - dry_coeff * np.tanh(theta_dot / dry_smoothing)
    return accel


def platform_accel(tilt, tilt_rate, command, actuator):
    """Servo tilt acceleration for one axis under a held command."""
    wn = actuator.natural_freq
    return wn * wn * (actuator.tilt_gain * command - tilt) \
        - 2.0 * actuator.damping_ratio * wn * tilt_rate


def inplane_gravity(beta, gamma, gravity=9.81):
    """Gravity acceleration projected on the plate plane, maze coordinates."""
    return (-gravity * np.sin(beta), -gravity * np.sin(gamma) * np.cos(beta))


def radial_gravity_drive(theta, beta, gamma, gravity=9.81):
    """Inward (toward the maze centre) component of in-plane gravity."""
    gx, gy = inplane_gravity(beta, gamma, gravity)
    return -(gx * np.cos(theta) + gy * np.sin(theta))
