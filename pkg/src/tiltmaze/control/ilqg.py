"""Iterative LQG trajectory optimization over learned discrete dynamics.

Derivatives of the dynamics are taken by central finite differences in a
single batched model call per iteration. The backward pass regularizes
the value Hessian with a scalar mu that grows on failure and shrinks on
success; once mu falls below its floor it snaps to zero so a converged
plan carries exact unregularized Riccati gains. The forward pass
backtracks over a fixed line-search schedule and accepts a candidate
when the realized cost reduction is at least a tenth of the quadratic
model's prediction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from ..core.angles import angle_diff
from ..core.errors import ValidationError
from .costs import ACTION_DIM, STATE_DIM, state_error

ALPHAS = tuple(0.5 ** i for i in range(7))
MU_FLOOR = 1e-6
MU_CAP = 1e10
ACCEPT_RATIO = 0.1


@dataclass
class TrajectoryPlan:
    """Locally optimal trajectory with time-varying feedback.

    states: (H+1, 6) nominal states, actions: (H, 2) nominal actions.
    gains and feedforward come from a final backward pass around the
    nominal, so tracking with ``action(k, x)`` from states[0] reproduces
    the nominal exactly.
    """

    states: np.ndarray
    actions: np.ndarray
    gains: np.ndarray
    feedforward: np.ndarray
    cost: float
    converged: bool
    iterations: int
    cost_trace: np.ndarray

    @property
    def horizon(self):
        return len(self.actions)

    def action(self, k, x):
        """Feedback action at plan step k for current state x (unclipped)."""
        dx = state_error(np.asarray(x, dtype=float), self.states[k])
        return self.actions[k] + self.gains[k] @ dx


def fd_jacobians(dynamics, states, actions, fd_state=1e-4, fd_action=1e-3):
    """Central-difference A (H,6,6) and B (H,6,2) along a trajectory.

    All perturbations for all timesteps go through one batched dynamics
    call. The angular component of the output is differenced shortest-arc
    so Jacobians stay correct across the wrap boundary.
    """
    xs = np.asarray(states, dtype=float)[:-1]
    us = np.asarray(actions, dtype=float)
    H = len(us)
    reps = 2 * STATE_DIM + 2 * ACTION_DIM
    Xb = np.repeat(xs[:, None, :], reps, axis=1)
    Ub = np.repeat(us[:, None, :], reps, axis=1)
    for i in range(STATE_DIM):
        Xb[:, 2 * i, i] += fd_state
        Xb[:, 2 * i + 1, i] -= fd_state
    for j in range(ACTION_DIM):
        Ub[:, 2 * STATE_DIM + 2 * j, j] += fd_action
        Ub[:, 2 * STATE_DIM + 2 * j + 1, j] -= fd_action
    F = dynamics.step_batch(Xb.reshape(-1, STATE_DIM),
                            Ub.reshape(-1, ACTION_DIM))
    F = np.asarray(F).reshape(H, reps, STATE_DIM)

    def _delta(plus, minus):
        d = plus - minus
        d[:, 0] = angle_diff(plus[:, 0], minus[:, 0])
        return d

    A = np.empty((H, STATE_DIM, STATE_DIM))
    B = np.empty((H, STATE_DIM, ACTION_DIM))
    for i in range(STATE_DIM):
        A[:, :, i] = _delta(F[:, 2 * i], F[:, 2 * i + 1]) / (2 * fd_state)
    for j in range(ACTION_DIM):
        off = 2 * STATE_DIM + 2 * j
        B[:, :, j] = _delta(F[:, off], F[:, off + 1]) / (2 * fd_action)
    return A, B


def _cost_terms(cost, xs, us):
    H = len(us)
    lx = np.empty((H, STATE_DIM))
    lu = np.empty((H, ACTION_DIM))
    lxx = np.empty((H, STATE_DIM, STATE_DIM))
    luu = np.empty((H, ACTION_DIM, ACTION_DIM))
    total = 0.0
    for k in range(H):
        v, lx[k], lu[k], lxx[k], luu[k] = cost.running(xs[k], us[k])
        total += v
    v_term, vx, vxx = cost.terminal(xs[-1])
    return total + v_term, lx, lu, lxx, luu, vx, vxx


def _backward(A, B, lx, lu, lxx, luu, vx, vxx, mu):
    """One backward sweep; returns None when a Quu loses positive
    definiteness under the current regularization."""
    H = len(A)
    gains = np.empty((H, ACTION_DIM, STATE_DIM))
    ff = np.empty((H, ACTION_DIM))
    dv1 = 0.0
    dv2 = 0.0
    reg = mu * np.eye(STATE_DIM)
    for k in reversed(range(H)):
        Ak, Bk = A[k], B[k]
        qx = lx[k] + Ak.T @ vx
        qu = lu[k] + Bk.T @ vx
        qxx = lxx[k] + Ak.T @ vxx @ Ak
        vreg = vxx + reg
        quu = luu[k] + Bk.T @ vreg @ Bk
        qux = Bk.T @ vreg @ Ak
        try:
            low = np.linalg.cholesky(quu)
        except np.linalg.LinAlgError:
            return None
        kk = -cho_solve((low, True), qu)
        Kk = -cho_solve((low, True), qux)
        dv1 += kk @ qu
        dv2 += 0.5 * kk @ quu @ kk
        vx = qx + Kk.T @ quu @ kk + Kk.T @ qu + qux.T @ kk
        vxx = qxx + Kk.T @ quu @ Kk + Kk.T @ qux + qux.T @ Kk
        vxx = 0.5 * (vxx + vxx.T)
        gains[k] = Kk
        ff[k] = kk
    return gains, ff, dv1, dv2


def _forward_all(dynamics, xs, us, gains, ff, alphas, action_limit):
    """Line-search forward passes for every alpha in one batched sweep."""
    H = len(us)
    nA = len(alphas)
    al = np.asarray(alphas, dtype=float)
    xs_new = np.empty((nA, H + 1, STATE_DIM))
    us_new = np.empty((nA, H, ACTION_DIM))
    xs_new[:, 0] = xs[0]
    for k in range(H):
        dx = xs_new[:, k] - xs[k]
        dx[:, 0] = angle_diff(xs_new[:, k, 0], xs[k, 0])
        u = us[k] + al[:, None] * ff[k] + dx @ gains[k].T
        if action_limit is not None:
            u = np.clip(u, -action_limit, action_limit)
        us_new[:, k] = u
        xs_new[:, k + 1] = dynamics.step_batch(xs_new[:, k], u)
    return xs_new, us_new


def simulate(dynamics, x0, actions):
    """Open-loop rollout of the planning dynamics."""
    us = np.asarray(actions, dtype=float)
    xs = np.empty((len(us) + 1, STATE_DIM))
    xs[0] = np.asarray(x0, dtype=float)
    for k in range(len(us)):
        xs[k + 1] = dynamics.step_batch(xs[k][None], us[k][None])[0]
    return xs


def ilqg(dynamics, cost, x0, horizon=40, u_init=None, *,
         max_iterations=100, tol=1e-6, action_limit=1.0,
         fd_state=1e-4, fd_action=1e-3):
    """Plan a trajectory minimizing ``cost`` under ``dynamics`` from x0.

    dynamics must provide step_batch((B, 6), (B, 2)) -> (B, 6); cost must
    provide running(x, u) -> (value, lx, lu, lxx, luu) and
    terminal(x) -> (value, vx, vxx). Returns a TrajectoryPlan whose
    cost_trace is non-increasing across accepted iterations.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (STATE_DIM,):
        raise ValidationError("x0 must be a 6-dim state")
    if u_init is None:
        us = np.zeros((horizon, ACTION_DIM))
    else:
        us = np.array(u_init, dtype=float)
        if us.shape != (horizon, ACTION_DIM):
            raise ValidationError("u_init must have shape (horizon, 2)")
    xs = simulate(dynamics, x0, us)
    total, lx, lu, lxx, luu, vx, vxx = _cost_terms(cost, xs, us)
    trace = [total]
    mu = MU_FLOOR
    converged = False
    iterations = 0
    gains = np.zeros((horizon, ACTION_DIM, STATE_DIM))
    ff = np.zeros((horizon, ACTION_DIM))

    for iterations in range(1, max_iterations + 1):
        A, B = fd_jacobians(dynamics, xs, us, fd_state, fd_action)
        back = _backward(A, B, lx, lu, lxx, luu, vx, vxx, mu)
        while back is None and mu < MU_CAP:
            mu = max(mu * 10.0, MU_FLOOR)
            back = _backward(A, B, lx, lu, lxx, luu, vx, vxx, mu)
        if back is None:
            break
        gains, ff, dv1, dv2 = back
        # quadratic model predicts essentially no descent: already optimal
        if -(dv1 + dv2) < tol * max(abs(total), 1e-12):
            converged = True
            break

        xs_all, us_all = _forward_all(dynamics, xs, us, gains, ff,
                                      ALPHAS, action_limit)
        accepted = False
        for i, alpha in enumerate(ALPHAS):
            new_terms = _cost_terms(cost, xs_all[i], us_all[i])
            new_total = new_terms[0]
            if not np.isfinite(new_total):
                continue
            expected = -(alpha * dv1 + alpha * alpha * dv2)
            reduction = total - new_total
            if expected > 0:
                ok = reduction / expected > ACCEPT_RATIO
            else:
                # quadratic model predicts no descent; accept any
                # strict improvement
                ok = reduction > 0
            if ok:
                xs, us = xs_all[i], us_all[i]
                total, lx, lu, lxx, luu, vx, vxx = new_terms
                trace.append(total)
                accepted = True
                rel = reduction / max(abs(total), 1e-12)
                break
        if accepted:
            mu *= 0.5
            if mu < MU_FLOOR:
                mu = 0.0
            if rel < tol:
                converged = True
                break
        else:
            if mu >= MU_CAP:
                break
            mu = max(mu * 10.0, MU_FLOOR)

    # final backward pass so the returned gains wrap the returned nominal
    A, B = fd_jacobians(dynamics, xs, us, fd_state, fd_action)
    back = _backward(A, B, lx, lu, lxx, luu, vx, vxx, mu)
    if back is None:
        back = _backward(A, B, lx, lu, lxx, luu, vx, vxx, max(mu, 1.0))
    if back is not None:
        gains, ff = back[0], back[1]

    return TrajectoryPlan(states=xs, actions=us, gains=gains,
                          feedforward=ff, cost=total, converged=converged,
                          iterations=iterations,
                          cost_trace=np.asarray(trace))
