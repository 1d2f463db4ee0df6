"""First-order averaging, measured: deviation of the fast-forced flow from the
averaged flow and its empirical convergence order in the frequency ``lam``."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as _quad

from .errors import DegenerateFit, QuadratureFailure
from .models import ForcedSystem
from .ode import State, VectorField, integrate

DEVIATION_SAMPLES = 1000


def mean_value(g, T: float) -> float:
    """Mean of ``g`` over one period ``T`` by adaptive quadrature (abs. error <= 1e-12)."""
    if not T > 0:
        raise ValueError("period must be positive")
    with warnings.catch_warnings():
        # the returned error estimate is checked below
        warnings.simplefilter("ignore", _quad.IntegrationWarning)
        value, err = _quad.quad(lambda t: float(g(t)), 0.0, T, epsabs=1e-14, epsrel=1e-14,
                                limit=500)
    if not err <= 1e-12 * T:
        raise QuadratureFailure(f"quadrature error estimate {err!r} exceeds 1e-12")
    return value / T


@dataclass(frozen=True)
class AveragedSystem:
    base: VectorField
    averaged: VectorField
    lam: float
    mean: float
    M: float
    mu: float
    system: Optional[ForcedSystem] = field(default=None, compare=False)


def _field_diagnostics(fld: VectorField, box, rng, n, t_span):
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    pts = lo + (hi - lo) * rng.random((n, lo.size))
    ts = t_span * rng.random(n)
    dirs = rng.standard_normal((n, lo.size))
    dirs /= np.max(np.abs(dirs), axis=1, keepdims=True)
    eps = 1e-6 * np.max(hi - lo)
    M = 0.0
    mu = 0.0
    for t, p, d in zip(ts, pts, dirs):
        a = fld(t, p)
        b = fld(t, p + eps * d)
        M = max(M, float(np.max(np.abs(a))))
        mu = max(mu, float(np.max(np.abs(b - a))) / eps)
    return M, mu


def averaged_field(sys: ForcedSystem, *, seed: int = 0, n_samples: int = 10**4,
                   diagnostics: bool = True) -> AveragedSystem:
    """Replace the fast forcing ``g(lam t)`` of ``sys`` by its mean over one period.

    ``M`` (sup of the forced field) and ``mu`` (Lipschitz estimate) are sampled
    at ``n_samples`` random points of ``sys.box``.
    """
    base = sys.field()
    if sys.forcing is None:
        mean, averaged, lam = 0.0, sys.build(None), 1.0
    else:
        mean = mean_value(sys.forcing.g, sys.forcing.period)
        averaged = sys.build(sys.forcing.replaced_by(mean))
        lam = sys.forcing.lam
    M = mu = float("nan")
    if diagnostics:
        rng = np.random.default_rng(seed)
        t_span = 10 * sys.forcing.fast_period if sys.forcing is not None else 10.0
        M, mu = _field_diagnostics(base, sys.box, rng, n_samples, max(t_span, 2 * math.pi))
    return AveragedSystem(base, averaged, lam, mean, M, mu, sys)


def deviation(avg: AveragedSystem, ic: State, horizon: float, tol: float = 1e-10) -> float:
    """Max over 1000 uniform samples of ``max_i |x_i(t) - x0_i(t)|`` on ``[t0, t0 + horizon]``.

    Both systems start from the same ``ic``.
    """
    t1 = ic.t + horizon
    forced = integrate(avg.base, ic, t1, tol)
    mean = integrate(avg.averaged, ic, t1, tol)
    ts = np.linspace(ic.t, t1, DEVIATION_SAMPLES)
    return float(np.max(np.abs(forced(ts) - mean(ts))))


@dataclass
class AveragingReport:
    lambdas: list
    deviations: list
    horizon: float
    t0: float
    ic: list
    fitted_order: float
    M: float
    mu: float
    tol: float
    mean: float = 0.0
    fit_mask: list = field(default_factory=list)

    def to_dict(self):
        return {
            "lambdas": [float(x) for x in self.lambdas],
            "deviations": [float(x) for x in self.deviations],
            "horizon": float(self.horizon),
            "t0": float(self.t0),
            "ic": [float(x) for x in self.ic],
            "fitted_order": float(self.fitted_order),
            "M": float(self.M),
            "mu": float(self.mu),
            "tol": float(self.tol),
            "mean": float(self.mean),
            "fit_mask": [bool(x) for x in self.fit_mask],
        }

    def rows(self):
        return [(lam, dev) for lam, dev in zip(self.lambdas, self.deviations)]


def fit_order(lambdas, deviations, tol):
    """Least-squares slope of ``log(deviation)`` against ``log(1/lam)``."""
    lambdas = np.asarray(lambdas, dtype=float)
    deviations = np.asarray(deviations, dtype=float)
    if np.all(deviations < 10 * tol):
        raise DegenerateFit("all deviations are below 10*tol: the forcing never engaged")
    mask = deviations > 100 * tol
    if mask.sum() < 2:
        raise DegenerateFit("fewer than two deviations exceed 100*tol")
    slope = np.polyfit(np.log(1.0 / lambdas[mask]), np.log(deviations[mask]), 1)[0]
    return float(slope), mask


def convergence_study(sys: ForcedSystem, lambdas: Sequence[float], ic: State, horizon: float,
                      tol: float = 1e-10, seed: int = 0) -> AveragingReport:
    """Deviation for each ``lam`` and the fitted convergence order."""
    lambdas = [float(x) for x in lambdas]
    if len(lambdas) < 4:
        raise ValueError("need at least four lambdas")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambdas must be strictly increasing")
    devs = []
    first = None
    for lam in lambdas:
        avg = averaged_field(sys.with_lambda(lam), seed=seed, diagnostics=first is None)
        if first is None:
            first = avg
        devs.append(deviation(avg, ic, horizon, tol))
    order, mask = fit_order(lambdas, devs, tol)
    return AveragingReport(lambdas, devs, float(horizon), ic.t, list(ic.y), order,
                           first.M, first.mu, tol, first.mean, list(mask))
