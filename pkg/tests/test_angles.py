import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tiltmaze.core import angle_diff, wrap_angle


def test_wrap_fixed_points():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(np.pi) == -np.pi
    assert wrap_angle(-np.pi) == -np.pi
    assert wrap_angle(3 * np.pi) == pytest.approx(-np.pi)


def test_wrap_half_open_interval_boundaries():
    eps = 1e-12
    assert wrap_angle(np.pi - eps) < np.pi
    assert wrap_angle(-np.pi - eps) < np.pi
    assert wrap_angle(-np.pi - eps) >= -np.pi


@given(st.floats(-50.0, 50.0), st.integers(-8, 8))
def test_wrap_mod_two_pi_oracle(a, k):
    # Oracle: shifting by any whole number of turns cannot change the result.
    assert wrap_angle(a + 2 * np.pi * k) == pytest.approx(wrap_angle(a), abs=1e-9)


@given(st.floats(-1e4, 1e4))
def test_wrap_range_and_idempotence(a):
    w = wrap_angle(a)
    assert -np.pi <= w < np.pi
    assert wrap_angle(w) == pytest.approx(w, abs=1e-12)


def test_wrap_vectorized():
    a = np.array([0.0, np.pi, -np.pi, 3 * np.pi, -2.5 * np.pi])
    w = wrap_angle(a)
    assert w.shape == a.shape
    assert np.all((-np.pi <= w) & (w < np.pi))


def test_wrap_rejects_non_finite():
    with pytest.raises(ValueError):
        wrap_angle(np.nan)
    with pytest.raises(ValueError):
        wrap_angle(np.inf)
    with pytest.raises(ValueError):
        wrap_angle(np.array([0.0, np.inf]))


def test_angle_diff_examples():
    assert angle_diff(0.1, -0.1) == pytest.approx(0.2)
    # Shortest arc across the wrap point.
    assert angle_diff(np.pi - 0.1, -np.pi + 0.1) == pytest.approx(-0.2)


@given(st.floats(-10.0, 10.0), st.floats(-10.0, 10.0))
def test_angle_diff_antisymmetry(a, b):
    d = angle_diff(a, b)
    assert -np.pi <= d < np.pi
    if abs(abs(d) - np.pi) > 1e-9:  # antisymmetry breaks only exactly at -pi
        assert angle_diff(b, a) == pytest.approx(-d, abs=1e-9)


@given(st.floats(-10.0, 10.0), st.floats(-3.0, 3.0))
def test_angle_diff_recovers_small_offsets(a, d):
    if abs(d) < np.pi - 1e-9:
        assert angle_diff(a + d, a) == pytest.approx(d, abs=1e-9)
