import numpy as np
import pytest

from tiltmaze.core import MazeGeometry, ValidationError, wrap_angle


def test_default_ring_radii_even_spacing():
    geo = MazeGeometry()
    assert geo.n_rings == 5
    assert geo.ring_radii[0] == pytest.approx(0.95 * 0.110)
    assert geo.ring_radii[-1] == pytest.approx(0.25 * 0.110)
    assert np.allclose(np.diff(geo.ring_radii), np.diff(geo.ring_radii)[0])


def test_default_gate_positions():
    geo = MazeGeometry()
    for k in range(1, geo.n_rings):
        gates = geo.inward_gates(k)
        assert len(gates) == 1
        assert gates[0] == pytest.approx(wrap_angle(k * np.pi / 3.0))
    assert geo.inward_gates(geo.n_rings) == ()
    assert geo.outward_gates(1) == ()
    assert geo.outward_gates(2) == geo.inward_gates(1)


def test_gate_half_width_positive_and_radius_scaled():
    geo = MazeGeometry()
    halves = [geo.gate_half_width(r) for r in range(1, 6)]
    assert all(h > 0 for h in halves)
    assert halves == sorted(halves)  # tighter radius, wider angular span
    assert halves[0] == pytest.approx(0.5 * 0.016 / (0.95 * 0.110))


def test_ball_angular_size():
    geo = MazeGeometry()
    assert geo.ball_angular_size(1) == pytest.approx(0.01275 / (0.95 * 0.110))


def test_in_gate_span():
    geo = MazeGeometry()
    centre = geo.inward_gates(1)[0]
    half = geo.gate_half_width(1)
    assert geo.in_gate_span(1, centre) == centre
    assert geo.in_gate_span(1, centre + 0.9 * half) == centre
    assert geo.in_gate_span(1, centre + 1.1 * half) is None
    assert geo.in_gate_span(1, centre, inward=False) is None  # ring 1 has no outward


def test_invalid_geometry_rejected():
    with pytest.raises(ValidationError):
        MazeGeometry(n_rings=1)
    with pytest.raises(ValidationError):
        MazeGeometry(ring_radii=(0.05, 0.06, 0.04, 0.03, 0.02))  # not decreasing
    with pytest.raises(ValidationError):
        MazeGeometry(ring_radii=(0.2, 0.1, 0.05, 0.04, 0.03))  # exceeds plate
    with pytest.raises(ValidationError):
        MazeGeometry(openings=((), (), (), (), (0.5,)))  # innermost has a gate
