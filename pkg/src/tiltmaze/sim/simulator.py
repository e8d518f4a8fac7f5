"""Sampled-data maze simulator: RK4 plant integration, gates, observation."""

import math
from collections import deque

import numpy as np

from ..core.angles import angle_diff, wrap_angle
from ..core.errors import ValidationError
from ..core.state import Action, BallState, FullState, PlatformState
from .config import SimConfig

# Bounced balls are re-seated this far inside the gate span edge (rad).
_BOUNCE_INSET = 1e-6


class MazeSimulator:
    """Ground-truth plant.

    Holds the true continuous state (theta, theta_dot, beta, beta_dot, gamma,
    gamma_dot) plus the ring index and the pending command delay line.  One
    ``step`` advances a single sample period with the commanded action; the
    action that reaches the servos is the one issued ``delay_samples`` steps
    earlier (zeros before any command history exists).
    """

    def __init__(self, config=None, seed=0):
        self.config = config if config is not None else SimConfig()
        self._rng = np.random.default_rng(seed)
        self.reset()

    def reset(self, state=None, seed=None, held_action=(0.0, 0.0)):
        """Set the true state; the delay line starts full of `held_action`."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        if state is None:
            state = FullState(ball=BallState(ring=1, theta=0.0, theta_dot=0.0),
                              platform=PlatformState())
        self._ring = state.ball.ring
        self.config.geometry._check_ring(self._ring)
        self._y = [state.ball.theta, state.ball.theta_dot,
                   state.platform.beta, state.platform.beta_dot,
                   state.platform.gamma, state.platform.gamma_dot]
        held = (float(held_action[0]), float(held_action[1]))
        self._delay = deque([held] * self.config.delay_samples,
                            maxlen=max(1, self.config.delay_samples))
        return self.state

    @property
    def state(self):
        theta, theta_dot, beta, beta_dot, gamma, gamma_dot = self._y
        return FullState(
            ball=BallState(self._ring, wrap_angle(theta), theta_dot),
            platform=PlatformState(beta, beta_dot, gamma, gamma_dot),
        )

    # -- continuous dynamics ------------------------------------------------

    def _deriv(self, y, u_eff):
        # Scalar fast path; mirrors dynamics.true_ball_accel / platform_accel.
        theta, theta_dot, beta, beta_dot, gamma, gamma_dot = y
        cfg = self.config
        act = cfg.actuator
        wn = act.natural_freq
        beta_ddot = wn * wn * (act.tilt_gain * u_eff[0] - beta) \
            - 2.0 * act.damping_ratio * wn * beta_dot
        gamma_ddot = wn * wn * (act.tilt_gain * u_eff[1] - gamma) \
            - 2.0 * act.damping_ratio * wn * gamma_dot
        sin_th = math.sin(theta)
        cos_th = math.cos(theta)
        cos_ga = math.cos(gamma)
        g_r = cfg.gravity / cfg.geometry.ring_radius(self._ring)
        theta_ddot = (
            beta_ddot * math.sin(gamma)
            - beta_dot * beta_dot * sin_th * cos_ga * cos_ga * cos_th
            + 2.0 * beta_dot * gamma_dot * cos_ga
            - 2.0 * beta_dot * gamma_dot * cos_ga * cos_th * cos_th
            + 0.5 * gamma_dot * gamma_dot * math.sin(2.0 * theta)
            + g_r * math.sin(beta) * sin_th
            - g_r * math.sin(gamma) * math.cos(beta) * cos_th
            - cfg.viscous_coeff * theta_dot
            - cfg.dry_coeff * math.tanh(theta_dot / cfg.dry_smoothing)
        )
        return (theta_dot, theta_ddot, beta_dot, beta_ddot, gamma_dot, gamma_ddot)

    def _rk4(self, y, u_eff, h, n):
        for _ in range(n):
            k1 = self._deriv(y, u_eff)
            y2 = [y[i] + 0.5 * h * k1[i] for i in range(6)]
            k2 = self._deriv(y2, u_eff)
            y3 = [y[i] + 0.5 * h * k2[i] for i in range(6)]
            k3 = self._deriv(y3, u_eff)
            y4 = [y[i] + h * k3[i] for i in range(6)]
            k4 = self._deriv(y4, u_eff)
            y = [y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                 for i in range(6)]
        return y

    # -- gate and wall-end handling ----------------------------------------

    def _radial_drive(self, y):
        theta, _, beta, _, gamma, _ = y
        g = self.config.gravity
        gx = -g * math.sin(beta)
        gy = -g * math.sin(gamma) * math.cos(beta)
        return -(gx * math.cos(theta) + gy * math.sin(theta))

    def _gate_events(self, y_before, y_after):
        """Apply at most one ring transition or wall-end bounce per step."""
        geo = self.config.geometry
        threshold = self.config.gate_drive_threshold
        ring = self._ring
        half = geo.gate_half_width(ring)
        drive_after = self._radial_drive(y_after)
        theta_after = wrap_angle(y_after[0])

        # A ball sitting in a gate span with enough radial gravity falls
        # through to the adjacent ring; theta and theta_dot carry over.
        candidates = []
        if ring < geo.n_rings and drive_after > threshold:
            candidates += [(c, ring + 1) for c in geo.inward_gates(ring)]
        if ring > 1 and -drive_after > threshold:
            candidates += [(c, ring - 1) for c in geo.outward_gates(ring)]
        for centre, new_ring in candidates:
            if abs(angle_diff(theta_after, centre)) <= half:
                self._ring = new_ring
                return "transition"

        # A ball that was pressed into a gate opening (radial drive held at
        # the step start) and slid past the opening's end hits the wall end:
        # reflect theta_dot with restitution and seat it just inside the span.
        drive_before = self._radial_drive(y_before)
        theta_before = wrap_angle(y_before[0])
        pressed = []
        if ring < geo.n_rings and drive_before > threshold:
            pressed += geo.inward_gates(ring)
        if ring > 1 and -drive_before > threshold:
            pressed += geo.outward_gates(ring)
        for centre in pressed:
            off_before = angle_diff(theta_before, centre)
            off_after = angle_diff(theta_after, centre)
            if abs(off_before) <= half < abs(off_after):
                edge = half - _BOUNCE_INSET
                y_after[0] = wrap_angle(centre + math.copysign(edge, off_after))
                y_after[1] = -self.config.restitution * y_after[1]
                return "bounce"
        return None

    # -- public stepping interface ------------------------------------------

    def step(self, action):
        """Advance one sample period under `action`; returns the true state."""
        if isinstance(action, Action):
            u = (action.u_beta, action.u_gamma)
        else:
            u = (float(action[0]), float(action[1]))
        if not (abs(u[0]) <= 1.0 and abs(u[1]) <= 1.0):
            raise ValidationError("action components must lie in [-1, 1]")
        cfg = self.config
        if cfg.delay_samples > 0:
            # Command issued now reaches the servo delay_samples steps later.
            u_eff = self._delay.popleft()
            self._delay.append(u)
        else:
            u_eff = u
        y_before = list(self._y)
        h = cfg.dt / cfg.substeps
        y_after = self._rk4(list(self._y), u_eff, h, cfg.substeps)
        self._gate_events(y_before, y_after)
        y_after[0] = wrap_angle(y_after[0])
        for tilt_idx in (2, 4):
            if abs(y_after[tilt_idx]) > cfg.tilt_limit:
                y_after[tilt_idx] = math.copysign(cfg.tilt_limit, y_after[tilt_idx])
                y_after[tilt_idx + 1] = 0.0
        self._y = y_after
        return self.state

    def observe(self):
        """Noisy measurement: theta and tilts perturbed, velocities unknown."""
        noise = self.config.noise
        theta, _, beta, _, gamma, _ = self._y
        theta_obs = wrap_angle(theta + noise.theta_std * self._rng.standard_normal())
        beta_obs = beta + noise.tilt_std * self._rng.standard_normal()
        gamma_obs = gamma + noise.tilt_std * self._rng.standard_normal()
        return FullState(
            ball=BallState(self._ring, theta_obs, float("nan")),
            platform=PlatformState(beta_obs, float("nan"), gamma_obs, float("nan")),
        )
