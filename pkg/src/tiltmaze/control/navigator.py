"""Closed-loop maze navigation built from learned models.

A run alternates within-ring repositioning and gate crossings: plan a
trajectory to the nearest opening with iLQG, track it with the plan's
time-varying gains, fall back to PD when the ball strays from the
nominal, and once inside the opening's span hold the learned transition
tilt until the ring changes.

Actuation delay is compensated by mirroring the command queue: feedback
always acts on the state predicted forward through the commands that
have been issued but have not yet reached the servo.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..core.angles import angle_diff, wrap_angle
from ..core.errors import ValidationError
from ..core.state import Trajectory
from .costs import CostConfig, TargetCost
from .dynamics import LearnedDynamics
from .ilqg import ilqg
from .pd import PdGains, pd_action
from .transitions import pairs_from_geometry, transition_action


@dataclass(frozen=True)
class NavigatorConfig:
    goal_ring: int = 5
    horizon: int = 40
    segment_timeout: float = 10.0
    total_timeout: float = 60.0
    deviation_threshold: float = 0.3
    pd_burst_steps: int = 15
    transition_timeout: float = 2.0
    span_entry_rate: float = 1.5
    max_plan_iterations: int = 40
    cost: CostConfig = field(default_factory=CostConfig)
    pd_gains: PdGains = field(default_factory=PdGains)


@dataclass
class SegmentRecord:
    ring: int
    target_theta: float
    t_start: float
    t_end: float
    outcome: str


@dataclass
class RunLog:
    success: bool
    elapsed: float
    goal_ring: int
    final_ring: int
    segments: list
    trajectory: Trajectory


class ClosedLoopExecutor:
    """Steps a simulator while mirroring its command delay line.

    Issued commands are queued locally so the controller can predict the
    state at the moment a command issued now actually takes effect, then
    apply feedback in that frame. Also accumulates a full run log.
    """

    def __init__(self, sim, trajectory_id="run"):
        self.sim = sim
        self.dt = sim.config.dt
        self.delay = sim.config.delay_samples
        self.pending = deque(np.zeros(2) for _ in range(self.delay))
        self.t = 0.0
        self.trajectory_id = trajectory_id
        self._rows = []

    def state_vector(self):
        s = self.sim.state
        return np.array([s.ball.theta, s.ball.theta_dot,
                         s.platform.beta, s.platform.beta_dot,
                         s.platform.gamma, s.platform.gamma_dot])

    def effect_state(self, dynamics):
        """Planning-frame state: current state advanced through the
        pending commands."""
        x = self.state_vector()
        if not self.pending:
            return x
        return dynamics.rollout(x, np.array(self.pending))

    def issue(self, u):
        u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
        s = self.sim.state
        self._rows.append((self.t, s.ball.ring, s.ball.theta,
                           s.ball.theta_dot, s.platform.beta,
                           s.platform.beta_dot, s.platform.gamma,
                           s.platform.gamma_dot, u[0], u[1]))
        out = self.sim.step(u)
        if self.delay:
            self.pending.popleft()
            self.pending.append(u)
        self.t += self.dt
        return out

    def finish(self):
        s = self.sim.state
        self._rows.append((self.t, s.ball.ring, s.ball.theta,
                           s.ball.theta_dot, s.platform.beta,
                           s.platform.beta_dot, s.platform.gamma,
                           s.platform.gamma_dot, np.nan, np.nan))
        cols = np.asarray(self._rows, dtype=float)
        return Trajectory(
            t=cols[:, 0], ring=cols[:, 1].astype(int), theta=cols[:, 2],
            theta_dot=cols[:, 3], beta=cols[:, 4], beta_dot=cols[:, 5],
            gamma=cols[:, 6], gamma_dot=cols[:, 7], u=cols[:, 8:10],
            trajectory_id=self.trajectory_id)


def _merge_pairs(clusters, geometry):
    """Learned cluster pairs, with true opening centers filling any
    boundary the data never crossed."""
    pairs = list(clusters)
    for cand in pairs_from_geometry(geometry):
        seen = any(p.outer_ring == cand.outer_ring
                   and abs(angle_diff(p.outer_theta, cand.outer_theta)) < 0.3
                   for p in pairs)
        if not seen:
            pairs.append(cand)
    return pairs


def _select_pair(pairs, ring, theta, inward):
    if inward:
        cands = [p for p in pairs if p.outer_ring == ring]
        key = [abs(angle_diff(theta, p.outer_theta)) for p in cands]
    else:
        cands = [p for p in pairs if p.inner_ring == ring]
        key = [abs(angle_diff(theta, p.inner_theta)) for p in cands]
    if not cands:
        return None
    return cands[int(np.argmin(key))]


def navigate_maze(sim, ball_models, beta_arx, gamma_arx, clusters, *,
                  config=None, trajectory_id="maze-run"):
    """Drive the ball from its current ring to config.goal_ring.

    ball_models maps ring index to a fitted acceleration model;
    beta_arx/gamma_arx are the learned command-to-tilt models (orders
    (2, 1) with the true delay). clusters come from
    learn_transition_clusters; openings missing from them are filled
    from the maze geometry.
    """
    nav = config if config is not None else NavigatorConfig()
    geometry = sim.config.geometry
    if nav.goal_ring < 1 or nav.goal_ring > geometry.n_rings:
        raise ValidationError("goal_ring outside the maze")
    dyn = {ring: LearnedDynamics(model, beta_arx, gamma_arx, sim.config.dt)
           for ring, model in ball_models.items()}
    pairs = _merge_pairs(clusters, geometry)
    ex = ClosedLoopExecutor(sim, trajectory_id)
    segments = []
    success = sim.state.ball.ring == nav.goal_ring

    while not success and ex.t < nav.total_timeout:
        ring = sim.state.ball.ring
        inward = nav.goal_ring > ring
        pair = _select_pair(pairs, ring, sim.state.ball.theta, inward)
        if pair is None or ring not in dyn:
            raise ValidationError(
                f"no transition pair or model for ring {ring}")
        target_theta = pair.outer_theta if inward else pair.inner_theta
        seg_start = ex.t
        deadline = min(seg_start + nav.segment_timeout, nav.total_timeout)
        outcome = "timeout"

        while ex.t < deadline:
            s = sim.state
            if s.ball.ring != ring:
                outcome = "transition"
                break
            in_span = geometry.in_gate_span(ring, s.ball.theta,
                                            inward=inward) is not None
            near = abs(angle_diff(s.ball.theta, target_theta)) < 0.35
            if in_span and near and abs(s.ball.theta_dot) \
                    < nav.span_entry_rate:
                if _push(ex, pair, inward, ring, nav, deadline):
                    outcome = "transition"
                    break
                continue
            status = _track_segment(ex, dyn[ring], ring, target_theta,
                                    inward, nav, geometry, deadline)
            if status == "ring":
                outcome = "transition"
                break
            if status == "deviate":
                _pd_burst(ex, ring, target_theta, nav, deadline)
            # "span", "exhausted" and "deadline" fall through to the
            # segment loop, which re-examines the state

        segments.append(SegmentRecord(ring=ring, target_theta=target_theta,
                                      t_start=seg_start, t_end=ex.t,
                                      outcome=outcome))
        success = sim.state.ball.ring == nav.goal_ring

    return RunLog(success=success, elapsed=ex.t, goal_ring=nav.goal_ring,
                  final_ring=sim.state.ball.ring, segments=segments,
                  trajectory=ex.finish())


def _track_segment(ex, dynamics, ring, target_theta, inward, nav,
                   geometry, deadline):
    """Plan to the opening and track the plan; returns why tracking ended."""
    x0 = ex.effect_state(dynamics)
    target = np.array([target_theta, 0.0, 0.0, 0.0, 0.0, 0.0])
    plan = ilqg(dynamics, TargetCost(target, nav.cost), x0,
                horizon=nav.horizon,
                max_iterations=nav.max_plan_iterations)
    for j in range(plan.horizon):
        if ex.t >= deadline:
            return "deadline"
        x_est = ex.effect_state(dynamics)
        if abs(angle_diff(x_est[0], plan.states[j, 0])) \
                > nav.deviation_threshold:
            return "deviate"
        ex.issue(plan.action(j, x_est))
        s = ex.sim.state
        if s.ball.ring != ring:
            return "ring"
        if geometry.in_gate_span(ring, s.ball.theta, inward=inward) \
                is not None \
                and abs(angle_diff(s.ball.theta, target_theta)) < 0.35 \
                and abs(s.ball.theta_dot) < nav.span_entry_rate:
            return "span"
    return "exhausted"


def _pd_burst(ex, ring, target_theta, nav, deadline):
    """Short PD recovery toward the target before replanning."""
    for _ in range(nav.pd_burst_steps):
        if ex.t >= deadline:
            return
        s = ex.sim.state
        if s.ball.ring != ring:
            return
        ex.issue(pd_action(s.ball.theta, s.ball.theta_dot, target_theta,
                           nav.pd_gains))


def _push(ex, pair, inward, ring, nav, deadline):
    """Hold the transition tilt until the ring changes or time runs out."""
    u = transition_action(pair, ex.sim.config.actuator, inward=inward)
    end = min(ex.t + nav.transition_timeout, deadline)
    while ex.t < end:
        ex.issue(u)
        if ex.sim.state.ball.ring != ring:
            return True
    return False
