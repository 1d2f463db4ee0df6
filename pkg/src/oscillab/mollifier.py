"""Smooth cut-offs that switch the fast forcing off near window boundaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

DEFAULT_DELTA = 0.05


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(r):
    """C-infinity step: 0 for ``r <= 0``, 1 for ``r >= 1``, 1/2 at ``r = 1/2``."""
    r = np.asarray(r, dtype=float)
    a = _bump(r)
    b = _bump(1.0 - r)
    return a / (a + b)


def _step_scalar(r):
    if r <= 0.0:
        return 0.0
    if r >= 1.0:
        return 1.0
    a = math.exp(-1.0 / r)
    b = math.exp(-1.0 / (1.0 - r))
    return a / (a + b)


@dataclass(frozen=True)
class Mollifier:
    """Product of box cut-offs over the components ``coords`` of the state.

    Each box ``b`` has centre ``centers[b]``. Inside ``|y_k - c_k| <= delta_k/2``
    for every ``k`` the box factor is 0; if any ``|y_k - c_k| >= delta_k`` it is 1.
    ``centers`` may be a constant array of shape ``(n_boxes, len(coords))`` or a
    callable ``t -> array`` for moving plateaus.
    """

    coords: tuple
    centers: Union[np.ndarray, Callable]
    delta: Union[float, Sequence[float]] = DEFAULT_DELTA

    def __post_init__(self):
        coords = tuple(int(c) for c in np.atleast_1d(self.coords))
        delta = np.broadcast_to(np.asarray(self.delta, dtype=float), (len(coords),)).copy()
        if np.any(delta <= 0):
            raise ValueError("mollifier half-widths must be positive")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "delta", tuple(delta))
        if not callable(self.centers):
            centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
            if centers.shape[1] != len(coords):
                raise ValueError("centers must have one column per constrained coordinate")
            object.__setattr__(self, "centers", centers)

    @property
    def time_dependent(self) -> bool:
        return callable(self.centers)

    def centers_at(self, t) -> np.ndarray:
        if self.time_dependent:
            return np.atleast_2d(self.centers(t))
        return self.centers

    def plateau_zero(self, t=0.0):
        """Zero plateaus as lists of closed intervals, one list per box."""
        return [[(c - d / 2, c + d / 2) for c, d in zip(row, self.delta)]
                for row in self.centers_at(t)]

    def __call__(self, t, y) -> float:
        value = 1.0
        for row in self.centers_at(t):
            keep = 1.0
            for k, c, d in zip(self.coords, row, self.delta):
                half = 0.5 * d
                keep *= 1.0 - _step_scalar((abs(y[k] - c) - half) / half)
                if keep == 0.0:
                    break
            value *= 1.0 - keep
            if value == 0.0:
                return 0.0
        return value


def mollifier_eval(m: Mollifier, point, t: float = 0.0) -> float:
    """Value of ``m`` at a phase point; coordinates not in ``m.coords`` are ignored."""
    point = np.atleast_1d(np.asarray(point, dtype=float))
    if point.size < max(m.coords) + 1:
        full = np.zeros(max(m.coords) + 1)
        full[list(m.coords)] = point
        point = full
    return m(t, point)


def strip_mollifier(delta=DEFAULT_DELTA) -> Mollifier:
    """sigma(y): zero near the strip edges ``y = +-1``."""
    return Mollifier((1,), [[-1.0], [1.0]], delta)


def pendulum_mollifier(delta=DEFAULT_DELTA) -> Mollifier:
    """sigma(x, x'): zero near the rest points ``(0, 0)`` and ``(pi, 0)``."""
    return Mollifier((0, 1), [[0.0, 0.0], [math.pi, 0.0]], delta)


def curve_mollifier(curve, law, delta=DEFAULT_DELTA, fd_step=1e-5) -> Mollifier:
    """sigma(t, s, s'): zero near the moving points ``(s_i(t), s_i'(t))``.

    The rates ``s_i'`` come from central differences of the vertical-tangent
    points with step ``fd_step``.
    """
    from .curves import boundary_curves

    s1, s2 = boundary_curves(curve, law)

    def centers(t):
        ts = np.array([t - fd_step, t, t + fd_step])
        a, b = s1(ts), s2(ts)
        return np.array([[a[1], (a[2] - a[0]) / (2 * fd_step)],
                         [b[1], (b[2] - b[0]) / (2 * fd_step)]])

    return Mollifier((0, 1), centers, delta)
