"""Physical feature basis for the ball's angular acceleration.

For a ball constrained to a circular channel of radius r on a plate tilted by
roll/pitch angles (beta, gamma), the rigid-body angular acceleration of the
ball position angle theta decomposes into seven terms: one from plate angular
acceleration, four velocity-product terms, and two gravity terms,

    t1 = beta_ddot * sin(gamma)
    t2 = -beta_dot^2 * sin(theta) * cos(gamma)^2 * cos(theta)
    t3 =  2 * beta_dot * gamma_dot * cos(gamma)
    t4 = -2 * beta_dot * gamma_dot * cos(gamma) * cos(theta)^2
    t5 =  0.5 * gamma_dot^2 * sin(2 theta)
    t6 =  (g / r) * sin(beta) * sin(theta)
    t7 = -(g / r) * sin(gamma) * cos(beta) * cos(theta)

Summing the seven terms with unit weights gives the friction-free
acceleration; this sum is the fixed physics-only predictor.  The terms also
serve as regression features for the physics-inspired Bayesian linear layer.

A six-feature variant (``variant="merged_gravity"``) is kept for comparison:
it merges t5 and t6 into a single product feature and carries the gravity
scale inside both gravity features, so that each gravity feature contains a
factor g as well as the shared g/r scale.  It is not dimensionally consistent
and is off by default.
"""

from dataclasses import dataclass

import numpy as np

from .core.errors import ValidationError
from .core.state import AUGMENTED_COLUMNS

GRAVITY = 9.81

SEVEN_TERM = "seven_term"
MERGED_GRAVITY = "merged_gravity"

_N_FEATURES = {SEVEN_TERM: 7, MERGED_GRAVITY: 6}


@dataclass(frozen=True)
class BasisConfig:
    """Feature-basis settings: variant name, channel radius, gravity."""

    ring_radius: float
    variant: str = SEVEN_TERM
    gravity: float = GRAVITY

    def __post_init__(self):
        if self.variant not in _N_FEATURES:
            raise ValidationError(f"unknown basis variant {self.variant!r}")
        if self.ring_radius <= 0:
            raise ValidationError("ring_radius must be positive")

    @property
    def n_features(self):
        return _N_FEATURES[self.variant]


def _check_inputs(x):
    x = np.asarray(x, dtype=float)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != len(AUGMENTED_COLUMNS):
        raise ValidationError("inputs must have 8 columns (augmented state)")
    return x, squeeze


def features(x, basis):
    """Evaluate the feature basis at augmented inputs.

    Parameters
    ----------
    x : (8,) or (N, 8) array
        Augmented inputs, columns per ``AUGMENTED_COLUMNS``.
    basis : BasisConfig

    Returns
    -------
    (n_features,) or (N, n_features) array
    """
    x, squeeze = _check_inputs(x)
    th, th_d, be, be_d, ga, ga_d, be_dd, _ = x.T
    g_r = basis.gravity / basis.ring_radius
    sin_th, cos_th = np.sin(th), np.cos(th)
    cos_ga = np.cos(ga)
    if basis.variant == SEVEN_TERM:
        phi = np.column_stack([
            be_dd * np.sin(ga),
            -be_d ** 2 * sin_th * cos_ga ** 2 * cos_th,
            2.0 * be_d * ga_d * cos_ga,
            -2.0 * be_d * ga_d * cos_ga * cos_th ** 2,
            0.5 * ga_d ** 2 * np.sin(2.0 * th),
            g_r * np.sin(be) * sin_th,
            -g_r * np.sin(ga) * np.cos(be) * cos_th,
        ])
    else:
        # Merged variant: t5 and t6 fused, gravity factor duplicated.
        phi = np.column_stack([
            be_dd * np.sin(ga),
            -be_d ** 2 * sin_th * cos_ga ** 2 * cos_th,
            2.0 * be_d * ga_d * cos_ga,
            -2.0 * be_d * ga_d * cos_ga * cos_th ** 2,
            0.5 * ga_d ** 2 * np.sin(2.0 * th) * basis.gravity
            * np.sin(be) * sin_th / basis.ring_radius,
            -basis.gravity * np.sin(ga) * np.cos(be) * cos_th * g_r,
        ])
    return phi[0] if squeeze else phi


def predict_physics(x, basis):
    """Friction-free acceleration: the feature terms summed with unit weights."""
    phi = features(x, basis)
    return phi.sum(axis=-1)
