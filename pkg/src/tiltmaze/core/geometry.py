"""Circular-maze geometry: concentric rings joined by gate openings.

Rings are indexed 1..n_rings from the outermost channel inward.  Ring k is a
circular channel of mean radius ``ring_radii[k-1]``; the wall between ring k
and ring k+1 has one or more openings (gates) through which the ball can
change ring.  Angles follow the [-pi, pi) convention of :mod:`.angles`.
"""

from dataclasses import dataclass, field

import numpy as np

from .angles import angle_diff, wrap_angle
from .errors import ValidationError


def _default_ring_radii(maze_radius, n_rings):
    # Evenly spaced mean radii from 0.95 R (outermost) to 0.25 R (innermost).
    return tuple(np.linspace(0.95 * maze_radius, 0.25 * maze_radius, n_rings))


def _default_openings(n_rings):
    # One gate per ring boundary, ring k's gate centred at k*pi/3.
    gates = [(wrap_angle(k * np.pi / 3.0),) for k in range(1, n_rings)]
    gates.append(())
    return tuple(gates)


@dataclass(frozen=True)
class MazeGeometry:
    """Static description of the maze plate.

    Attributes
    ----------
    maze_radius : float
        Outer plate radius in metres.
    ball_diameter : float
        Ball diameter in metres.
    opening_width : float
        Arc width of each gate opening in metres.
    n_rings : int
        Number of concentric channels (>= 2).
    ring_radii : tuple of float
        Mean channel radius per ring, strictly decreasing, all < maze_radius.
    openings : tuple of tuple of float
        ``openings[k-1]`` holds the gate centre angles (rad, wrapped) that
        connect ring k to ring k+1.  The innermost entry is empty.
    """

    maze_radius: float = 0.110
    ball_diameter: float = 0.01275
    opening_width: float = 0.016
    n_rings: int = 5
    ring_radii: tuple = field(default=None)
    openings: tuple = field(default=None)

    def __post_init__(self):
        if self.ring_radii is None:
            object.__setattr__(
                self, "ring_radii", _default_ring_radii(self.maze_radius, self.n_rings)
            )
        if self.openings is None:
            object.__setattr__(self, "openings", _default_openings(self.n_rings))
        object.__setattr__(self, "ring_radii", tuple(float(r) for r in self.ring_radii))
        object.__setattr__(
            self, "openings", tuple(tuple(float(a) for a in g) for g in self.openings)
        )
        self._validate()

    def _validate(self):
        if self.n_rings < 2:
            raise ValidationError("n_rings must be >= 2")
        if len(self.ring_radii) != self.n_rings:
            raise ValidationError("ring_radii must have one entry per ring")
        if len(self.openings) != self.n_rings:
            raise ValidationError("openings must have one entry per ring")
        if self.openings[-1]:
            raise ValidationError("innermost ring has no inward gates")
        radii = np.asarray(self.ring_radii)
        if not np.all(np.diff(radii) < 0):
            raise ValidationError("ring_radii must be strictly decreasing (outermost first)")
        if not np.all(radii < self.maze_radius):
            raise ValidationError("ring_radii must be smaller than maze_radius")
        if not np.all(radii > 0):
            raise ValidationError("ring_radii must be positive")
        if self.opening_width <= 0 or self.ball_diameter <= 0:
            raise ValidationError("opening_width and ball_diameter must be positive")

    def ring_radius(self, ring):
        self._check_ring(ring)
        return self.ring_radii[ring - 1]

    def _check_ring(self, ring):
        if not 1 <= ring <= self.n_rings:
            raise ValidationError(f"ring must be in 1..{self.n_rings}, got {ring}")

    def gate_half_width(self, ring):
        """Angular half-width of a gate opening as seen from ring's radius."""
        return 0.5 * self.opening_width / self.ring_radius(ring)

    def ball_angular_size(self, ring):
        """Angle subtended by the ball diameter at ring's radius."""
        return self.ball_diameter / self.ring_radius(ring)

    def inward_gates(self, ring):
        """Gate centre angles connecting `ring` to ring+1 (empty for innermost)."""
        self._check_ring(ring)
        return self.openings[ring - 1]

    def outward_gates(self, ring):
        """Gate centre angles connecting `ring` back to ring-1 (empty for ring 1)."""
        self._check_ring(ring)
        if ring == 1:
            return ()
        return self.openings[ring - 2]

    def in_gate_span(self, ring, theta, inward=True):
        """Return the centre angle of the gate span containing theta, else None.

        The span half-width is evaluated at the radius of `ring`, whichever
        side of the wall the ball is on.
        """
        gates = self.inward_gates(ring) if inward else self.outward_gates(ring)
        half = self.gate_half_width(ring)
        for centre in gates:
            if abs(angle_diff(theta, centre)) <= half:
                return centre
        return None
