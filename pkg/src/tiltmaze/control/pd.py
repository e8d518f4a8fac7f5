"""Proportional-derivative baseline controller for within-ring moves."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.angles import angle_diff


@dataclass(frozen=True)
class PdGains:
    position: float = 2.0
    rate: float = 0.5


def pd_action(theta, theta_dot, target_theta, gains=PdGains(), limit=1.0):
    """Tilt command steering the ball toward target_theta along its ring.

    The scalar PD signal is mapped into the two tilt channels through
    (sin theta, -cos theta): at small tilts the gravity-driven angular
    acceleration grows with beta as sin(theta) and with gamma as
    -cos(theta), so this direction pushes the ball along +theta
    regardless of where it sits on the ring.
    """
    s = gains.position * angle_diff(target_theta, theta) \
        - gains.rate * theta_dot
    s = float(np.clip(s, -limit, limit))
    return np.array([s * math.sin(theta), -s * math.cos(theta)])
