import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscillab.mollifier import (Mollifier, mollifier_eval, pendulum_mollifier, smooth_step,
                                strip_mollifier)


def test_smooth_step_profile():
    assert smooth_step(0.0) == 0.0
    assert smooth_step(1.0) == 1.0
    assert smooth_step(0.5) == pytest.approx(0.5, abs=1e-15)
    r = np.linspace(-1, 2, 301)
    assert np.all(np.diff(smooth_step(r)) >= 0)


def test_plateaus():
    m = strip_mollifier(0.1)
    assert mollifier_eval(m, [0.0, 1.0]) == 0.0
    assert mollifier_eval(m, [0.0, 1.04]) == 0.0
    assert mollifier_eval(m, [0.0, 0.0]) == 1.0
    assert mollifier_eval(m, [0.0, 0.9]) == 1.0
    # transition midpoint at 3/4 of delta from the centre
    assert mollifier_eval(m, [0.0, 1.0 - 0.075]) == pytest.approx(0.5, abs=1e-14)


def test_pendulum_plateaus():
    m = pendulum_mollifier(0.05)
    assert m(0.0, np.array([0.0, 0.0])) == 0.0
    assert m(0.0, np.array([math.pi, 0.01])) == 0.0
    assert m(0.0, np.array([math.pi / 2, 0.0])) == 1.0
    # far in velocity only is enough to switch the forcing on
    assert m(0.0, np.array([0.0, 1.0])) == 1.0


def test_plateau_zero_intervals():
    m = strip_mollifier(0.2)
    assert m.plateau_zero() == [[(-1.1, -0.9)], [(0.9, 1.1)]]


def test_time_dependent_centres():
    m = Mollifier((0,), lambda t: np.array([[t]]), 0.1)
    assert m.time_dependent
    assert m(2.0, np.array([2.0])) == 0.0
    assert m(2.0, np.array([0.0])) == 1.0


def test_invalid_delta():
    with pytest.raises(ValueError):
        Mollifier((0,), [[0.0]], 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_values_in_unit_interval(x, v):
    val = pendulum_mollifier()(0.0, np.array([x, v]))
    assert 0.0 <= val <= 1.0


def test_c1_smooth_across_edges():
    m = strip_mollifier(0.1)
    h = 1e-7
    for edge in (1.0 - 0.05, 1.0 - 0.1):
        ys = edge + np.linspace(-1e-4, 1e-4, 21)
        d = [(mollifier_eval(m, [0, y + h]) - mollifier_eval(m, [0, y - h])) / (2 * h) for y in ys]
        assert np.max(np.abs(np.diff(d))) < 1e-6
