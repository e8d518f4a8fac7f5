"""Closed-loop repositioning experiments: move the ball a fixed angular
offset along its ring and measure settling behavior."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.angles import angle_diff, wrap_angle
from ..core.errors import ValidationError
from .costs import CostConfig, TargetCost
from .ilqg import ilqg
from .navigator import ClosedLoopExecutor
from .pd import PdGains, pd_action


@dataclass
class RepositionResult:
    trajectory: object
    target_theta: float
    settle_tolerance: float
    settling_time: float
    steady_error: float
    controller: str

    @property
    def settled(self):
        return math.isfinite(self.settling_time)


def settling_metrics(t, theta, target_theta, tol, steady_window=0.5):
    """(settling time, steady error) of an angle trace against a target.

    Settling time is the first instant after which the absolute error
    stays below tol for the remainder of the trace (inf if never);
    steady error is the mean absolute error over the trailing window.
    """
    err = np.abs(angle_diff(np.asarray(theta, dtype=float),
                            float(target_theta)))
    inside = err < tol
    if inside[-1]:
        idx = len(err) - 1
        while idx > 0 and inside[idx - 1]:
            idx -= 1
        settling = float(t[idx])
    else:
        settling = math.inf
    n_tail = max(1, int(round(steady_window / (t[1] - t[0]))))
    steady = float(err[-n_tail:].mean())
    return settling, steady


def run_repositioning(sim, dynamics, shift=np.pi / 4, duration=3.0, *,
                      controller="ilqg", cost=None, pd_gains=None,
                      horizon=40, max_plan_iterations=40,
                      settle_tolerance=None, trajectory_id="reposition"):
    """Steer the ball by `shift` radians along its current ring.

    controller is "ilqg" (planned trajectory tracked with time-varying
    gains, replanned when exhausted) or "pd" (the baseline). The default
    settle tolerance is the ball's angular size on its ring.
    """
    if controller not in ("ilqg", "pd"):
        raise ValidationError("controller must be 'ilqg' or 'pd'")
    cost = cost if cost is not None else CostConfig()
    pd_gains = pd_gains if pd_gains is not None else PdGains()
    geometry = sim.config.geometry
    ring = sim.state.ball.ring
    if settle_tolerance is None:
        settle_tolerance = geometry.ball_angular_size(ring)
    target_theta = wrap_angle(sim.state.ball.theta + shift)
    target = np.array([target_theta, 0.0, 0.0, 0.0, 0.0, 0.0])
    ex = ClosedLoopExecutor(sim, trajectory_id)
    n_steps = int(round(duration / ex.dt))

    if controller == "pd":
        for _ in range(n_steps):
            s = sim.state
            ex.issue(pd_action(s.ball.theta, s.ball.theta_dot,
                               target_theta, pd_gains))
    else:
        steps_left = n_steps
        while steps_left > 0:
            x0 = ex.effect_state(dynamics)
            plan = ilqg(dynamics, TargetCost(target, cost), x0,
                        horizon=horizon,
                        max_iterations=max_plan_iterations)
            for j in range(min(plan.horizon, steps_left)):
                ex.issue(plan.action(j, ex.effect_state(dynamics)))
            steps_left = n_steps - int(round(ex.t / ex.dt))

    traj = ex.finish()
    settling, steady = settling_metrics(traj.t, traj.theta, target_theta,
                                        settle_tolerance)
    return RepositionResult(trajectory=traj, target_theta=target_theta,
                            settle_tolerance=settle_tolerance,
                            settling_time=settling, steady_error=steady,
                            controller=controller)
