"""Ring-transition behaviors learned from observed gate crossings.

Crossings are clustered by which opening they passed through; each
cluster pair (the two sides of one opening) yields a maze-plane
direction from the outer ring to the inner ring. The transition action
tilts the platform so that steady-state in-plane gravity points along
that direction, pushed to the largest command the actuator box allows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.angles import angle_diff, wrap_angle
from ..core.errors import ValidationError


@dataclass(frozen=True)
class ClusterPair:
    """Centroids on the two sides of one maze opening.

    direction is the unit maze-plane vector from the outer-side centroid
    to the inner-side centroid (it points inward through the opening).
    """

    outer_ring: int
    inner_ring: int
    outer_theta: float
    inner_theta: float
    direction: np.ndarray
    n_events: int


def _circular_mean(angles):
    a = np.asarray(angles, dtype=float)
    return math.atan2(float(np.mean(np.sin(a))), float(np.mean(np.cos(a))))


def _pair_from_events(outer_ring, outer_thetas, inner_thetas, geometry):
    outer_theta = _circular_mean(outer_thetas)
    inner_theta = _circular_mean(inner_thetas)
    r_out = geometry.ring_radii[outer_ring - 1]
    r_in = geometry.ring_radii[outer_ring]
    p_out = r_out * np.array([math.cos(outer_theta), math.sin(outer_theta)])
    p_in = r_in * np.array([math.cos(inner_theta), math.sin(inner_theta)])
    d = p_in - p_out
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise ValidationError("degenerate transition cluster; zero offset")
    return ClusterPair(outer_ring=outer_ring, inner_ring=outer_ring + 1,
                       outer_theta=wrap_angle(outer_theta),
                       inner_theta=wrap_angle(inner_theta),
                       direction=d / norm, n_events=len(outer_thetas))


def learn_transition_clusters(trajectories, geometry, proximity=0.2,
                              min_events=1):
    """Extract ClusterPairs from the ring transitions in trajectories.

    Crossings of the same ring boundary are grouped greedily by angular
    proximity; crossings in both directions contribute to the same pair.
    Returns pairs sorted by (outer ring, outer angle). A crossing
    happens between two samples and conserves the angular position, so
    each event's angle is the circular midpoint of the bracketing
    samples; either raw sample alone smears by up to a whole sample of
    travel at speed. One gate's events still spread over its physical
    angular span (which grows toward the centre), so the grouping radius
    is proximity plus the gate half-width at the boundary's inner ring.
    Clusters with fewer than min_events crossings are dropped as likely
    stray artifacts.
    """
    # buckets[outer_ring] -> list of [outer_thetas, inner_thetas]
    buckets = {}
    for traj in trajectories:
        for k in traj.transition_indices():
            r0, r1 = int(traj.ring[k]), int(traj.ring[k + 1])
            if abs(r1 - r0) != 1:
                continue
            outer_ring = min(r0, r1)
            mid = wrap_angle(traj.theta[k] + 0.5 * angle_diff(
                traj.theta[k + 1], traj.theta[k]))
            outer_th = inner_th = mid
            radius = proximity + geometry.gate_half_width(outer_ring + 1)
            clusters = buckets.setdefault(outer_ring, [])
            for cl in clusters:
                if abs(angle_diff(outer_th, _circular_mean(cl[0]))) \
                        < radius:
                    cl[0].append(outer_th)
                    cl[1].append(inner_th)
                    break
            else:
                clusters.append([[outer_th], [inner_th]])
    pairs = []
    for outer_ring, clusters in buckets.items():
        for outer_thetas, inner_thetas in clusters:
            if len(outer_thetas) < min_events:
                continue
            pairs.append(_pair_from_events(outer_ring, outer_thetas,
                                           inner_thetas, geometry))
    pairs.sort(key=lambda p: (p.outer_ring, p.outer_theta))
    return pairs


def pairs_from_geometry(geometry):
    """Synthetic cluster pairs at the true opening centers.

    Fallback for openings never crossed in the training data; the
    centroid of a well-sampled cluster converges to the same location.
    """
    pairs = []
    for ring in range(1, geometry.n_rings):
        for centre in geometry.outward_gates(ring + 1):
            pairs.append(_pair_from_events(ring, [centre], [centre],
                                           geometry))
    return pairs


def _gravity_dir(beta, gamma):
    # steady-state in-plane gravity direction (unnormalized, g dropped)
    return np.array([-math.sin(beta), -math.sin(gamma) * math.cos(beta)])


def _bisect(f, lo, hi, iters=80):
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def transition_action(pair, actuator, inward=True, limit=1.0):
    """Largest box-norm action whose steady-state gravity pushes through
    the opening.

    A command u yields steady tilt tilt_gain * u per axis; the induced
    in-plane gravity must be parallel to the pair's crossing direction
    (reversed for outward moves). One command component sits on the box
    boundary, the other is found by bisection on the parallelism
    residual.
    """
    d = np.asarray(pair.direction, dtype=float)
    if not inward:
        d = -d
    gain = actuator.tilt_gain

    def cross(u_beta, u_gamma):
        v = _gravity_dir(gain * u_beta, gain * u_gamma)
        return v[0] * d[1] - v[1] * d[0]

    if d[0] == 0.0:
        return np.array([0.0, -math.copysign(limit, d[1])])
    if d[1] == 0.0:
        return np.array([-math.copysign(limit, d[0]), 0.0])

    # candidate with the beta command saturated
    ub = -math.copysign(limit, d[0])
    ug = _bisect(lambda u: cross(ub, u), -limit, limit)
    if ug is not None:
        return np.array([ub, ug])
    # otherwise the gamma command saturates
    ug = -math.copysign(limit, d[1])
    ub = _bisect(lambda u: cross(u, ug), -limit, limit)
    if ub is None:
        raise ValidationError(
            "no box action realizes the transition direction")
    return np.array([ub, ug])
