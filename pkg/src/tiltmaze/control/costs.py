"""Trajectory costs with analytic first and second derivatives.

State error is penalized through a smoothed absolute value, which keeps
gradients bounded far from the target while staying twice differentiable
at it. Control effort uses a cosh penalty: nearly quadratic for small
commands and steeply increasing toward the actuator limits, which
discourages saturated plans without a hard constraint.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.angles import angle_diff
from ..core.errors import ValidationError

STATE_DIM = 6
ACTION_DIM = 2


@dataclass(frozen=True)
class CostConfig:
    """Weights and shape parameters for planning costs.

    state_weights order matches the planning state
    (theta, theta_dot, beta, beta_dot, gamma, gamma_dot).
    """

    state_weights: tuple = (1.0, 0.1, 0.2, 0.02, 0.2, 0.02)
    smooth_abs_width: float = 0.05
    control_scale: float = 0.4
    terminal_multiplier: float = 10.0

    def __post_init__(self):
        if len(self.state_weights) != STATE_DIM:
            raise ValidationError("state_weights must have length 6")
        if min(self.state_weights) < 0:
            raise ValidationError("state weights must be non-negative")
        if self.smooth_abs_width <= 0 or self.control_scale <= 0:
            raise ValidationError(
                "smooth_abs_width and control_scale must be positive")
        if self.terminal_multiplier <= 0:
            raise ValidationError("terminal_multiplier must be positive")


def state_error(x, target):
    """Componentwise error with the angular component taken shortest-arc."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(target, dtype=float)
    e = x - t
    e[..., 0] = angle_diff(x[..., 0], t[..., 0])
    return e


def cost_state(x, target, config, terminal=False):
    """Smoothed absolute state cost.

    Returns (value, gradient, hessian) where gradient is (6,) and the
    hessian is the exact (diagonal) (6, 6) second derivative. Zero at
    the target; approaches w_i * (|e_i| - alpha) for |e_i| >> alpha.
    """
    e = state_error(x, target)
    if e.shape != (STATE_DIM,):
        raise ValidationError("cost_state expects a single 6-dim state")
    w = np.asarray(config.state_weights, dtype=float)
    if terminal:
        w = w * config.terminal_multiplier
    alpha = config.smooth_abs_width
    root = np.sqrt(e ** 2 + alpha ** 2)
    value = float(np.sum(w * (root - alpha)))
    grad = w * e / root
    hess = np.diag(w * alpha ** 2 / root ** 3)
    return value, grad, hess


def cost_control(u, config):
    """Cosh control cost: nu^2 * (cosh(u/nu) - 1) summed over components."""
    u = np.asarray(u, dtype=float)
    if u.shape != (ACTION_DIM,):
        raise ValidationError("cost_control expects a single 2-dim action")
    nu = config.control_scale
    value = float(np.sum(nu ** 2 * (np.cosh(u / nu) - 1.0)))
    grad = nu * np.sinh(u / nu)
    hess = np.diag(np.cosh(u / nu))
    return value, grad, hess


@dataclass
class TargetCost:
    """Bundles the running and terminal cost of steering to a fixed state."""

    target: np.ndarray
    config: CostConfig = field(default_factory=CostConfig)

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=float)
        if self.target.shape != (STATE_DIM,):
            raise ValidationError("target must be a 6-dim state")

    def running(self, x, u):
        lx_val, lx, lxx = cost_state(x, self.target, self.config)
        lu_val, lu, luu = cost_control(u, self.config)
        return lx_val + lu_val, lx, lu, lxx, luu

    def terminal(self, x):
        return cost_state(x, self.target, self.config, terminal=True)

    def trajectory_cost(self, xs, us):
        total = 0.0
        for k in range(len(us)):
            total += self.running(xs[k], us[k])[0]
        total += self.terminal(xs[-1])[0]
        return total
