"""State containers shared across simulation, learning, and control.

The ball lives in a channel (ring) and is described by its angular position
theta and angular velocity theta_dot.  The plate orientation is the pair of
tilt angles (beta, gamma) with rates.  Learned forward models consume the
augmented input

    x = (theta, theta_dot, beta, beta_dot, gamma, gamma_dot, beta_ddot, gamma_ddot)

whose column order is fixed by ``AUGMENTED_COLUMNS``.  The ring index is not
part of the input; models are trained per ring.
"""

from dataclasses import dataclass

import numpy as np

from .angles import wrap_angle
from .errors import ValidationError

AUGMENTED_COLUMNS = (
    "theta",
    "theta_dot",
    "beta",
    "beta_dot",
    "gamma",
    "gamma_dot",
    "beta_ddot",
    "gamma_ddot",
)

TRANSITION_COLUMNS = (
    "theta",
    "theta_dot",
    "beta",
    "beta_dot",
    "gamma",
    "gamma_dot",
    "u_beta",
    "u_gamma",
)


@dataclass(frozen=True)
class BallState:
    ring: int
    theta: float
    theta_dot: float

    def __post_init__(self):
        if self.ring < 1:
            raise ValidationError("ring index must be >= 1")
        if not -np.pi <= self.theta < np.pi:
            raise ValidationError("theta must lie in [-pi, pi)")


@dataclass(frozen=True)
class PlatformState:
    beta: float = 0.0
    beta_dot: float = 0.0
    gamma: float = 0.0
    gamma_dot: float = 0.0


@dataclass(frozen=True)
class FullState:
    ball: BallState
    platform: PlatformState


@dataclass(frozen=True)
class Action:
    """Normalized servo command, each component in [-1, 1]."""

    u_beta: float
    u_gamma: float

    def __post_init__(self):
        if not (abs(self.u_beta) <= 1.0 and abs(self.u_gamma) <= 1.0):
            raise ValidationError("action components must lie in [-1, 1]")

    def as_array(self):
        return np.array([self.u_beta, self.u_gamma])


class Trajectory:
    """A uniformly sampled run of the system.

    Columns are stored as equal-length float arrays; quantities that are not
    available (velocities before filtering, acceleration targets in raw logs,
    the action on the final sample) hold NaN.

    Parameters
    ----------
    t : (N,) array
        Strictly increasing timestamps with uniform spacing.
    ring : (N,) int array
        Ring index per sample, 1-based.
    theta, theta_dot, beta, beta_dot, gamma, gamma_dot : (N,) arrays
        Ball angle (wrapped to [-pi, pi)) and plate tilts with rates.
    beta_ddot, gamma_ddot : (N,) arrays
        Plate accelerations (NaN until computed offline).
    u : (N, 2) array
        Commands issued at each sample; row N-1 is NaN (no action after the
        final sample).
    theta_ddot : (N,) array
        Ball acceleration regression target (NaN until computed offline).
    trajectory_id : str
        Stable identifier, used for dataset provenance.
    """

    def __init__(self, t, ring, theta, theta_dot, beta, beta_dot, gamma, gamma_dot,
                 beta_ddot=None, gamma_ddot=None, u=None, theta_ddot=None,
                 trajectory_id=""):
        self.t = np.asarray(t, dtype=float)
        n = self.t.shape[0]
        self.ring = np.asarray(ring, dtype=int)
        self.theta = np.asarray(theta, dtype=float)
        self.theta_dot = np.asarray(theta_dot, dtype=float)
        self.beta = np.asarray(beta, dtype=float)
        self.beta_dot = np.asarray(beta_dot, dtype=float)
        self.gamma = np.asarray(gamma, dtype=float)
        self.gamma_dot = np.asarray(gamma_dot, dtype=float)
        self.beta_ddot = self._opt(beta_ddot, n)
        self.gamma_ddot = self._opt(gamma_ddot, n)
        self.u = np.full((n, 2), np.nan) if u is None else np.asarray(u, dtype=float)
        self.theta_ddot = self._opt(theta_ddot, n)
        self.trajectory_id = trajectory_id
        self._validate()

    @staticmethod
    def _opt(values, n):
        if values is None:
            return np.full(n, np.nan)
        return np.asarray(values, dtype=float)

    def _validate(self):
        n = len(self.t)
        if n < 2:
            raise ValidationError("trajectory needs at least two samples")
        for name in ("ring", "theta", "theta_dot", "beta", "beta_dot", "gamma",
                     "gamma_dot", "beta_ddot", "gamma_ddot", "theta_ddot"):
            if getattr(self, name).shape != (n,):
                raise ValidationError(f"column {name} length mismatch")
        if self.u.shape != (n, 2):
            raise ValidationError("u must have shape (N, 2)")
        steps = np.diff(self.t)
        if not np.all(steps > 0):
            raise ValidationError("timestamps must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=1e-9):
            raise ValidationError("timestamps must be uniformly spaced")
        finite_theta = self.theta[np.isfinite(self.theta)]
        if finite_theta.size and (
            finite_theta.min() < -np.pi or finite_theta.max() >= np.pi
        ):
            raise ValidationError("theta must be wrapped to [-pi, pi)")
        if np.any(self.ring < 1):
            raise ValidationError("ring indices must be >= 1")

    def __len__(self):
        return len(self.t)

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def augmented_inputs(self):
        """Stack the model-input columns into an (N, 8) matrix."""
        return np.column_stack([getattr(self, c) for c in AUGMENTED_COLUMNS])

    def transition_indices(self):
        """Sample indices k where ring[k+1] != ring[k]."""
        return np.nonzero(np.diff(self.ring) != 0)[0]

    def state_at(self, k):
        return FullState(
            ball=BallState(int(self.ring[k]), wrap_angle(self.theta[k]),
                           float(self.theta_dot[k])),
            platform=PlatformState(float(self.beta[k]), float(self.beta_dot[k]),
                                   float(self.gamma[k]), float(self.gamma_dot[k])),
        )


class RegressionDataset:
    """Per-ring supervised set mapping augmented inputs to ball acceleration.

    ``inputs`` columns follow ``AUGMENTED_COLUMNS``; ``u`` keeps the command
    active at each source sample (not a model input, retained for provenance
    and for the on-disk column contract).
    """

    def __init__(self, ring, t, inputs, targets, u=None, source_ids=()):
        self.ring = int(ring)
        self.t = np.asarray(t, dtype=float)
        self.inputs = np.asarray(inputs, dtype=float)
        self.targets = np.asarray(targets, dtype=float)
        n = self.targets.shape[0]
        self.u = np.full((n, 2), np.nan) if u is None else np.asarray(u, dtype=float)
        self.source_ids = tuple(source_ids)
        if self.inputs.shape != (n, len(AUGMENTED_COLUMNS)):
            raise ValidationError("inputs must have shape (N, 8)")
        if self.t.shape != (n,) or self.u.shape != (n, 2):
            raise ValidationError("dataset column length mismatch")
        if n and not np.all(np.isfinite(self.inputs)):
            raise ValidationError("dataset inputs must be finite")
        if n and not np.all(np.isfinite(self.targets)):
            raise ValidationError("dataset targets must be finite")

    def __len__(self):
        return len(self.targets)


class TransitionDataset:
    """Per-ring one-sample transitions for the discrete forward model.

    ``inputs`` columns follow ``TRANSITION_COLUMNS``; ``deltas`` holds the
    per-sample change (delta_theta via shortest arc, delta_theta_dot).
    """

    def __init__(self, ring, t, inputs, deltas, source_ids=()):
        self.ring = int(ring)
        self.t = np.asarray(t, dtype=float)
        self.inputs = np.asarray(inputs, dtype=float)
        self.deltas = np.asarray(deltas, dtype=float)
        self.source_ids = tuple(source_ids)
        n = self.deltas.shape[0]
        if self.inputs.shape != (n, len(TRANSITION_COLUMNS)):
            raise ValidationError("transition inputs must have shape (N, 8)")
        if self.deltas.shape != (n, 2) or self.t.shape != (n,):
            raise ValidationError("transition column length mismatch")

    def __len__(self):
        return len(self.deltas)
