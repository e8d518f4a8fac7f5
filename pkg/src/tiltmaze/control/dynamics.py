"""Discrete-time planning dynamics assembled from learned components.

The planning state is (theta, theta_dot, beta, beta_dot, gamma,
gamma_dot). Each tilt axis advances through a learned second-order ARX
model; with two output lags and one input tap the pair (tilt, rate) is
an exact reparameterization of (tilt_k, tilt_{k-1}), so the 6-dim state
is Markov under the model. The ball advances through the same RK4 step
used by the evaluation rollouts, fed the ARX-implied platform columns.

Actions are indexed at their effect time: the actuation delay is not
part of the state, callers compensate by predicting through the queue
of issued-but-not-yet-effective commands (see ``rollout``).
"""
from __future__ import annotations

import numpy as np

from ..core.errors import ValidationError
from ..rollout import DT, ball_step
from .costs import ACTION_DIM, STATE_DIM


class LearnedDynamics:
    """One-step planning model: ARX platform advance plus learned ball step.

    ball_model predicts angular acceleration from the 8 augmented inputs;
    beta_arx and gamma_arx are per-axis command-to-tilt models with
    n_a == 2 and n_b == 1 (fit with the true actuation delay; the delay
    itself is handled by the caller's command queue, not here).
    """

    def __init__(self, ball_model, beta_arx, gamma_arx, dt=DT):
        for arx in (beta_arx, gamma_arx):
            if arx.n_a != 2 or arx.n_b != 1:
                raise ValidationError(
                    "planning requires ARX models with n_a=2, n_b=1; "
                    "other orders break the 6-dim Markov state")
        self.ball_model = ball_model
        self.beta_arx = beta_arx
        self.gamma_arx = gamma_arx
        self.dt = float(dt)

    def _axis_step(self, arx, tilt, rate, u):
        # tilt_{k-1} recovered from the backward-difference rate
        prev = tilt - self.dt * rate
        nxt = arx.a[0] * tilt + arx.a[1] * prev + arx.b[0] * u
        rate_nxt = (nxt - tilt) / self.dt
        accel = (rate_nxt - rate) / self.dt
        return nxt, rate_nxt, accel

    def platform_step_batch(self, P, U):
        """Advance tilt states (B, 4) under commands (B, 2).

        Returns (plat0, plat1): the 6 platform columns (tilts, rates,
        accelerations) at the step endpoints, with the acceleration held
        constant across the step.
        """
        P = np.asarray(P, dtype=float)
        U = np.asarray(U, dtype=float)
        b, bd, g, gd = P[:, 0], P[:, 1], P[:, 2], P[:, 3]
        b1, bd1, bacc = self._axis_step(self.beta_arx, b, bd, U[:, 0])
        g1, gd1, gacc = self._axis_step(self.gamma_arx, g, gd, U[:, 1])
        plat0 = np.column_stack([b, bd, g, gd, bacc, gacc])
        plat1 = np.column_stack([b1, bd1, g1, gd1, bacc, gacc])
        return plat0, plat1

    def step_batch(self, X, U):
        """Map states (B, 6) and effect-time actions (B, 2) one step."""
        X = np.asarray(X, dtype=float)
        U = np.asarray(U, dtype=float)
        if X.ndim != 2 or X.shape[1] != STATE_DIM:
            raise ValidationError("states must have shape (B, 6)")
        if U.shape != (len(X), ACTION_DIM):
            raise ValidationError("actions must have shape (B, 2)")
        plat0, plat1 = self.platform_step_batch(X[:, 2:], U)
        theta, theta_dot = ball_step(self.ball_model, X[:, 0], X[:, 1],
                                     plat0, plat1, self.dt)
        return np.column_stack([theta, theta_dot, plat1[:, :4]])

    def step(self, x, u):
        return self.step_batch(np.asarray(x)[None], np.asarray(u)[None])[0]

    def rollout(self, x, actions):
        """Iterate the step map; used to predict through queued commands."""
        x = np.asarray(x, dtype=float).copy()
        actions = np.asarray(actions, dtype=float).reshape(-1, ACTION_DIM)
        for u in actions:
            x = self.step(x, u)
        return x
