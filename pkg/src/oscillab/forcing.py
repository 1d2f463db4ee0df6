"""Forcing functions: a small named catalog and the bounded/oscillatory wrappers.

Catalog terms are ``zero``, ``const(c)``, ``sin(a, omega, phase)`` and
``cos(a, omega, phase)``; a :class:`CatalogFunction` sums up to four of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._periods import common_period

MAX_TERMS = 4
KINDS = ("zero", "const", "sin", "cos")


@dataclass(frozen=True)
class Term:
    kind: str
    a: float = 0.0
    omega: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown catalog term {self.kind!r}; expected one of {KINDS}")

    @property
    def period(self) -> Optional[float]:
        if self.kind in ("sin", "cos") and self.omega != 0 and self.a != 0:
            return 2 * math.pi / abs(self.omega)
        return None

    @property
    def mean(self) -> float:
        if self.kind == "const":
            return self.a
        if self.kind in ("sin", "cos") and self.omega == 0:
            return self(0.0)
        return 0.0

    def __call__(self, t):
        if self.kind == "zero":
            return 0.0 * t
        if self.kind == "const":
            return self.a + 0.0 * t
        arg = self.omega * t + self.phase
        if isinstance(arg, float):
            return self.a * (math.sin(arg) if self.kind == "sin" else math.cos(arg))
        return self.a * (np.sin(arg) if self.kind == "sin" else np.cos(arg))

    def derivative(self) -> "Term":
        if self.kind in ("zero", "const"):
            return Term("zero")
        if self.kind == "sin":
            return Term("cos", self.a * self.omega, self.omega, self.phase)
        return Term("sin", -self.a * self.omega, self.omega, self.phase)

    def bound(self) -> float:
        return 0.0 if self.kind == "zero" else abs(self.a)

    def describe(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "const":
            return f"const({self.a!r})"
        return f"{self.kind}({self.a!r}, {self.omega!r}, {self.phase!r})"


def zero():
    return CatalogFunction((Term("zero"),))


def const(c):
    return CatalogFunction((Term("const", c),))


def sin(a=1.0, omega=1.0, phase=0.0):
    return CatalogFunction((Term("sin", a, omega, phase),))


def cos(a=1.0, omega=1.0, phase=0.0):
    return CatalogFunction((Term("cos", a, omega, phase),))


@dataclass(frozen=True)
class CatalogFunction:
    """Sum of catalog terms, callable on floats and numpy arrays."""

    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not 1 <= len(terms) <= MAX_TERMS:
            raise ValueError(f"a catalog function takes 1..{MAX_TERMS} terms, got {len(terms)}")
        object.__setattr__(self, "terms", terms)

    def __call__(self, t):
        if len(self.terms) == 1:
            return self.terms[0](t)
        total = self.terms[0](t)
        for term in self.terms[1:]:
            total = total + term(t)
        return total

    def __add__(self, other):
        return CatalogFunction(self.terms + other.terms)

    @property
    def is_zero(self) -> bool:
        return all(term.kind == "zero" or term.a == 0 for term in self.terms)

    @property
    def period(self) -> Optional[float]:
        periods = [term.period for term in self.terms if term.period is not None]
        return common_period(periods) if periods else None

    @property
    def mean(self) -> float:
        return float(sum(term.mean for term in self.terms))

    @property
    def max_omega(self) -> float:
        return max((abs(term.omega) for term in self.terms if term.period), default=0.0)

    def derivative(self) -> "CatalogFunction":
        return CatalogFunction(tuple(term.derivative() for term in self.terms))

    def bound(self) -> float:
        return float(sum(term.bound() for term in self.terms))

    def describe(self) -> str:
        return " + ".join(term.describe() for term in self.terms)


def _sample_grid(period, n=10**4):
    span = period if period else 100.0
    return np.linspace(0.0, span, n)


@dataclass(frozen=True)
class Forcing:
    """Bounded pivot forcing ``f(t)`` with ``|f| <= f_bound`` and ``|f'| <= f_dot_bound``."""

    f: Callable
    f_bound: float
    f_dot_bound: float
    period: Optional[float] = None

    @classmethod
    def from_catalog(cls, fn: CatalogFunction) -> "Forcing":
        return cls(fn, fn.bound(), fn.derivative().bound(), fn.period)

    def __call__(self, t):
        return self.f(t)

    @property
    def is_zero(self) -> bool:
        return bool(getattr(self.f, "is_zero", False))

    @property
    def omega(self) -> float:
        return 2 * math.pi / self.period if self.period else 0.0

    def check(self, n=10**4) -> bool:
        t = _sample_grid(self.period, n)
        return bool(np.all(np.abs(self.f(t)) <= self.f_bound * (1 + 1e-12)))


@dataclass(frozen=True)
class OscillatoryForcing:
    """Fast forcing ``g(lam*t)`` with ``g`` of period ``period``.

    ``resolve=False`` marks a forcing that has been replaced by its mean, so the
    integrator need not cap the step for it.
    """

    g: Callable
    period: float
    lam: float = 1.0
    resolve: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("oscillatory forcing needs a positive period")
        if not self.lam > 0:
            raise ValueError(f"lambda must be > 0, got {self.lam!r}")

    @classmethod
    def from_catalog(cls, fn: CatalogFunction, lam: float = 1.0) -> "OscillatoryForcing":
        period = fn.period
        if period is None:
            # Constant (or zero) forcing: any period works.
            period = 2 * math.pi
            return cls(fn, period, lam, resolve=False)
        return cls(fn, period, lam)

    def __call__(self, t):
        return self.g(self.lam * t)

    @property
    def omega_max(self) -> float:
        if not self.resolve:
            return 0.0
        return 2 * math.pi * self.lam / self.period

    @property
    def fast_period(self) -> float:
        """Period of ``t -> g(lam*t)``."""
        return self.period / self.lam

    @property
    def is_zero(self) -> bool:
        return bool(getattr(self.g, "is_zero", False))

    def with_lambda(self, lam: float) -> "OscillatoryForcing":
        return OscillatoryForcing(self.g, self.period, lam, self.resolve)

    def replaced_by(self, value: float) -> "OscillatoryForcing":
        """The same slot holding the constant ``value`` (used for averaging)."""
        return OscillatoryForcing(const(value), self.period, self.lam, resolve=False)

    def is_periodic(self, n=10**4, atol=1e-10) -> bool:
        t = np.linspace(0.0, self.period, n)
        return bool(np.allclose(self.g(t), self.g(t + self.period), atol=atol, rtol=0))
