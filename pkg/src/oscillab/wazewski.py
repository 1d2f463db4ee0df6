"""Topological shooting: bisect a segment of initial conditions whose ends leave
the window through different boundary components, to find a solution that
does not leave it before the horizon."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .curves import ConvexCurve, RotationLaw, boundary_curves
from .errors import EndpointsSameSide, NoBracketProgress
from .ode import ExitReport, Outcome, State, VectorField, Window, integrate_with_exit

__all__ = [
    "Segment",
    "Probe",
    "SurvivalCertificate",
    "TransversalityReport",
    "classify_exit",
    "bisect_survivor",
    "verify_transversality",
    "collar_escape_times",
    "pendulum_segment",
    "strip_segment",
    "curve_segment",
]


@dataclass(frozen=True)
class Segment:
    """Straight segment of initial states at a common time, ``xi`` in ``[0, 1]``."""

    a: State
    b: State

    def __post_init__(self):
        if self.a.t != self.b.t:
            raise ValueError("segment endpoints must share the initial time")
        if self.a.y.size != self.b.y.size:
            raise ValueError("segment endpoints must have the same dimension")

    @classmethod
    def between(cls, ya, yb, t0: float = 0.0) -> "Segment":
        return cls(State(t0, ya), State(t0, yb))

    @property
    def t(self) -> float:
        return self.a.t

    def __call__(self, xi: float) -> State:
        return State(self.a.t, (1.0 - xi) * self.a.y + xi * self.b.y)


def pendulum_segment(t0=0.0, margin=0.2) -> Segment:
    """``{(x, 0) : x in [margin, pi - margin]}``."""
    return Segment.between([margin, 0.0], [math.pi - margin, 0.0], t0)


def strip_segment(t0=0.0, margin=0.1) -> Segment:
    """``{(0, y) : y in [-1 + margin, 1 - margin]}``."""
    return Segment.between([0.0, -1.0 + margin], [0.0, 1.0 - margin], t0)


def curve_segment(curve: ConvexCurve, law: RotationLaw, t0=0.0, offset=0.05,
                  kick=0.5, fd_step=1e-5) -> Segment:
    """From ``(s1 + offset, s1' - kick)`` to ``(s2 - offset, s2' + kick)`` at ``t0``."""
    s1, s2 = boundary_curves(curve, law)
    ts = np.array([t0 - fd_step, t0, t0 + fd_step])
    a, b = s1(ts), s2(ts)
    ra = (a[2] - a[0]) / (2 * fd_step)
    rb = (b[2] - b[0]) / (2 * fd_step)
    return Segment.between([a[1] + offset, ra - kick], [b[1] - offset, rb + kick], t0)


def classify_exit(field: VectorField, ic: State, window: Window, t_max: float,
                  tol: float = 1e-10) -> Outcome:
    """Side through which the solution from ``ic`` leaves, or ``SURVIVED`` by ``t_max``."""
    return integrate_with_exit(field, ic, t_max, window, tol).outcome


@dataclass(frozen=True)
class Probe:
    xi: float
    outcome: Outcome
    t_exit: Optional[float]


@dataclass
class SurvivalCertificate:
    """Result of :func:`bisect_survivor`.

    ``star_outcome`` is the classification of ``ic_star`` itself; a final
    bracket midpoint that exits is reported as such, never as a survivor.
    """

    xi_lo: float
    xi_hi: float
    xi_star: float
    ic_star: State
    t_max: float
    bracket_width: float
    tol: float
    xi_tol: float
    side_lo: Outcome
    side_hi: Outcome
    star_outcome: Outcome
    star_time: float
    exit_log: list = field(default_factory=list)
    segment: Optional[Segment] = None
    star_report: Optional[ExitReport] = field(default=None, repr=False)

    @property
    def survived(self) -> bool:
        return self.star_outcome is Outcome.SURVIVED

    @property
    def n_probes(self) -> int:
        """Interior probes (bisection midpoints and the final check); endpoints excluded."""
        return max(0, len(self.exit_log) - 2)

    def verify(self, field: VectorField, window: Window, tol_factor: float = 0.1) -> ExitReport:
        """Re-integrate ``ic_star`` at a tighter tolerance."""
        return integrate_with_exit(field, self.ic_star, self.ic_star.t + self.t_max, window,
                                   max(self.tol * tol_factor, 1e-13))

    def to_dict(self):
        return {
            "xi_lo": self.xi_lo,
            "xi_hi": self.xi_hi,
            "xi_star": self.xi_star,
            "ic_star": {"t": self.ic_star.t, "y": [float(v) for v in self.ic_star.y]},
            "t_max": self.t_max,
            "bracket_width": self.bracket_width,
            "tol": self.tol,
            "xi_tol": self.xi_tol,
            "side_lo": str(self.side_lo),
            "side_hi": str(self.side_hi),
            "star_outcome": str(self.star_outcome),
            "star_time": self.star_time,
            "survived": self.survived,
            "n_probes": self.n_probes,
            "exit_log": [{"xi": p.xi, "outcome": str(p.outcome), "t_exit": p.t_exit}
                         for p in self.exit_log],
        }

    def log_rows(self):
        return [(p.xi, str(p.outcome), "" if p.t_exit is None else p.t_exit)
                for p in self.exit_log]


def bisect_survivor(field: VectorField, seg: Segment, window: Window, t_max: float,
                    xi_tol: float = 1e-12, tol: float = 1e-10) -> SurvivalCertificate:
    """Bisect ``seg`` keeping endpoints that exit through opposite boundaries.

    Stops at the first probe that survives to ``seg.t + t_max`` or when the
    bracket is narrower than ``xi_tol``; in the latter case the midpoint is
    classified once more and reported with that classification.

    Raises
    ------
    EndpointsSameSide
        Both ends of ``seg`` leave through the same boundary component.
    NoBracketProgress
        The opposite-sides invariant broke during bisection.
    """
    t_end = seg.t + t_max
    log = []

    def probe(xi):
        rep = integrate_with_exit(field, seg(xi), t_end, window, tol)
        log.append(Probe(float(xi), rep.outcome, rep.t_exit))
        return rep

    def certificate(lo, hi, xi, rep, side_lo, side_hi):
        return SurvivalCertificate(lo, hi, xi, seg(xi), float(t_max), hi - lo, tol, xi_tol,
                                   side_lo, side_hi, rep.outcome, rep.survival_time,
                                   log, seg, rep)

    rep_a = probe(0.0)
    rep_b = probe(1.0)
    for xi, rep in ((0.0, rep_a), (1.0, rep_b)):
        if rep.outcome is Outcome.SURVIVED:
            return certificate(0.0, 1.0, xi, rep, rep_a.outcome, rep_b.outcome)
    if rep_a.outcome is rep_b.outcome:
        raise EndpointsSameSide(
            f"both segment endpoints exit through {rep_a.outcome.value}")

    lo, hi = 0.0, 1.0
    side_lo, side_hi = rep_a.outcome, rep_b.outcome
    while hi - lo >= xi_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        rep = probe(mid)
        if rep.outcome is Outcome.SURVIVED:
            return certificate(lo, hi, mid, rep, side_lo, side_hi)
        if rep.outcome is side_lo:
            lo = mid
        else:
            hi = mid
        if side_lo is side_hi:
            raise NoBracketProgress("bracket endpoints classify to the same side")
    mid = 0.5 * (lo + hi)
    return certificate(lo, hi, mid, probe(mid), side_lo, side_hi)


# Boundary diagnostics ------------------------------------------------------------

def _fd_derivatives(bound, t, h1=1e-5, h2=1e-4):
    v = bound(np.array([t - h1, t, t + h1, t - h2, t + h2]))
    return v[1], (v[2] - v[0]) / (2 * h1), (v[4] - 2 * v[1] + v[3]) / (h2 * h2)


@dataclass
class TransversalityReport:
    """Outward rates on each boundary component; positive means outward."""

    times: np.ndarray
    lower_margin: np.ndarray
    upper_margin: np.ndarray
    order: int

    @property
    def inward_lower(self) -> int:
        return int(np.sum(self.lower_margin < 0))

    @property
    def inward_upper(self) -> int:
        return int(np.sum(self.upper_margin < 0))

    @property
    def inward(self) -> int:
        return self.inward_lower + self.inward_upper

    @property
    def ok(self) -> bool:
        return self.inward == 0

    @property
    def min_margin(self) -> float:
        return float(min(self.lower_margin.min(), self.upper_margin.min()))

    def to_dict(self):
        return {"order": self.order, "samples": int(self.lower_margin.size + self.upper_margin.size),
                "inward_lower": self.inward_lower, "inward_upper": self.inward_upper,
                "min_lower_margin": float(self.lower_margin.min()),
                "min_upper_margin": float(self.upper_margin.min())}


def verify_transversality(field: VectorField, window: Window, t_grid: Sequence[float],
                          sample_count: int = 16, free_ranges: Optional[dict] = None
                          ) -> TransversalityReport:
    """Sign of the outward rate of the constrained coordinate on the boundary.

    For first-order windows (no ``velocity_coord``) the rate is ``dy_c/dt`` minus
    the boundary velocity. For second-order windows the sample sits at the
    tangency point ``(b(t), b'(t))`` and the rate is the acceleration minus
    ``b''(t)``; boundary derivatives come from finite differences. Components
    other than the constrained ones are swept over ``free_ranges`` with
    ``sample_count`` points each.
    """
    c, vc = window.coord, window.velocity_coord
    free_ranges = dict(free_ranges or {})
    fixed = {c} | ({vc} if vc is not None else set())
    free = [k for k in range(field.dim) if k not in fixed]
    missing = [k for k in free if k not in free_ranges]
    if missing:
        raise ValueError(f"free_ranges needs a range for components {missing}")
    if free:
        axes = [np.linspace(*free_ranges[k], sample_count) for k in free]
        combos = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(free), -1).T
    else:
        combos = np.zeros((1, 0))

    times, lower, upper = [], [], []
    for t in np.asarray(t_grid, dtype=float):
        for bound, sign, out in ((window.lower, -1.0, lower), (window.upper, 1.0, upper)):
            b, bd, bdd = _fd_derivatives(bound, t)
            for combo in combos:
                y = np.zeros(field.dim)
                y[free] = combo
                y[c] = b
                if vc is not None:
                    y[vc] = bd
                    rate = field(t, y)[vc] - bdd
                else:
                    rate = field(t, y)[c] - bd
                out.append(sign * float(rate))
        times.append(t)
    return TransversalityReport(np.array(times), np.array(lower), np.array(upper),
                                2 if vc is not None else 1)


def collar_escape_times(field: VectorField, window: Window, t0s: Sequence[float],
                        delta: float, n: int = 5, horizon: float = 20.0,
                        tol: float = 1e-10) -> np.ndarray:
    """Escape times from the boundary collars of width ``delta``.

    Second-order windows only: starts at ``(b + sign*delta*i/n, b' + delta*j/n)``
    inside the window near each boundary point. Entries are ``inf`` when the
    solution stays inside up to ``horizon``; the maximum bounds the escape
    time over the collar.
    """
    c, vc = window.coord, window.velocity_coord
    if vc is None:
        raise ValueError("collar escape times need a second-order window")
    out = []
    for t0 in t0s:
        for bound, inward in ((window.lower, 1.0), (window.upper, -1.0)):
            b, bd, _ = _fd_derivatives(bound, t0)
            for i in range(1, n + 1):
                for j in range(-n, n + 1):
                    y = np.zeros(field.dim)
                    y[c] = b + inward * delta * i / n
                    y[vc] = bd + delta * j / n
                    rep = integrate_with_exit(field, State(t0, y), t0 + horizon, window, tol)
                    out.append(rep.t_exit - t0 if rep.exited else math.inf)
    return np.array(out)
