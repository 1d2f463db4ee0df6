"""Scenario documents: validation and construction of the model objects.

A scenario is one JSON object. Validation happens before any numerics and
every error names the offending field. The full schema is documented in
``docs/scenarios.md``.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import forcing as fc
from .curves import ConvexCurve, RotationLaw, make_circle, make_ellipse
from .forcing import CatalogFunction, Forcing, OscillatoryForcing
from .models import (ForcedSystem, StripSystem, pendulum_system, rotating_curve_system,
                     strip_system)
from .mollifier import curve_mollifier, pendulum_mollifier, strip_mollifier

__all__ = ["ScenarioError", "Scenario", "load_scenario", "parse_catalog", "EXPERIMENTS", "MODELS"]

EXPERIMENTS = ("simulate", "survive", "average", "periodic", "curve-info")
MODELS = ("pendulum", "strip", "rotating_curve")

TOL_RANGE = (1e-13, 1e-3)
XI_TOL_RANGE = (1e-16, 1e-2)

_COMMON = {"experiment", "model", "name", "seed", "tol", "out_dir"}
_MODEL_KEYS = {
    "pendulum": {"f", "g", "lambda", "mollifier"},
    "strip": {"v", "w", "g", "lambda", "margin", "mollifier"},
    "rotating_curve": {"curve", "rotation", "rotation_c", "g", "lambda", "mollifier"},
}
_EXPERIMENT_KEYS = {
    "simulate": {"ic", "t0", "t_max", "samples", "stop_on_exit"},
    "survive": {"t0", "t_max", "xi_tol", "segment", "transversality_points"},
    "average": {"ic", "t0", "lambdas", "horizon"},
    "periodic": {"T", "ic", "newton_tol", "bounds"},
    "curve-info": {"phi_points"},
}


class ScenarioError(ValueError):
    """Invalid scenario; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# Primitive validators ---------------------------------------------------------

def _number(doc, key, default=None, *, lo=None, hi=None, strict_lo=False, required=False):
    if key not in doc or doc[key] is None:
        if required:
            raise ScenarioError(key, "is required")
        return default
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(key, f"must be a number, got {val!r}")
    val = float(val)
    if not math.isfinite(val):
        raise ScenarioError(key, f"must be finite, got {val!r}")
    if lo is not None and (val <= lo if strict_lo else val < lo):
        raise ScenarioError(key, f"must be {'>' if strict_lo else '>='} {lo:g}, got {val:g}")
    if hi is not None and val > hi:
        raise ScenarioError(key, f"must be <= {hi:g}, got {val:g}")
    return val


def _integer(doc, key, default, lo=None):
    val = doc.get(key, default)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ScenarioError(key, f"must be an integer, got {val!r}")
    if lo is not None and val < lo:
        raise ScenarioError(key, f"must be >= {lo}, got {val}")
    return val


def _vector(doc, key, dim, default=None, required=False):
    if key not in doc or doc[key] is None:
        if required:
            raise ScenarioError(key, "is required")
        return default
    val = doc[key]
    if (not isinstance(val, list) or len(val) != dim
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val)):
        raise ScenarioError(key, f"must be a list of {dim} numbers, got {val!r}")
    arr = np.array(val, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ScenarioError(key, "must be finite")
    return arr


def _term(spec, where):
    if isinstance(spec, str):
        if spec not in fc.KINDS or spec == "const":
            raise ScenarioError(where, f"unknown catalog name {spec!r}; expected zero, sin, cos "
                                "or a const object")
        return {"zero": fc.zero, "sin": fc.sin, "cos": fc.cos}[spec]()
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return fc.const(float(spec))
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ScenarioError(where, f"expected a catalog term, got {spec!r}")
    kind = spec["kind"]
    allowed = {"zero": set(), "const": {"c"}, "sin": {"a", "omega", "phase"},
               "cos": {"a", "omega", "phase"}}
    if kind not in allowed:
        raise ScenarioError(f"{where}.kind", f"unknown catalog name {kind!r}; expected one of "
                            f"{sorted(allowed)}")
    extra = set(spec) - allowed[kind] - {"kind"}
    if extra:
        raise ScenarioError(where, f"unexpected keys {sorted(extra)} for {kind}")
    if kind == "zero":
        return fc.zero()
    if kind == "const":
        return fc.const(_number(spec, "c", required=True))
    a = _number(spec, "a", 1.0)
    omega = _number(spec, "omega", 1.0)
    phase = _number(spec, "phase", 0.0)
    return (fc.sin if kind == "sin" else fc.cos)(a, omega, phase)


def parse_catalog(spec, where: str = "forcing") -> CatalogFunction:
    """Catalog function from a name, a number (constant), a term object or a list of up to 4."""
    if isinstance(spec, list):
        if not 1 <= len(spec) <= fc.MAX_TERMS:
            raise ScenarioError(where, f"takes 1..{fc.MAX_TERMS} terms, got {len(spec)}")
        out = _term(spec[0], f"{where}[0]")
        for i, item in enumerate(spec[1:], 1):
            out = out + _term(item, f"{where}[{i}]")
        return out
    return _term(spec, where)


def _affine(spec, where):
    """``{"c": c0, "x": cx, "y": cy}`` -> ``(x, y) -> c0 + cx*x + cy*y``."""
    if not isinstance(spec, dict) or set(spec) - {"c", "x", "y"}:
        raise ScenarioError(where, "must be an object with keys among c, x, y")
    c0 = _number(spec, "c", 0.0)
    cx = _number(spec, "x", 0.0)
    cy = _number(spec, "y", 0.0)

    def fn(x, y):
        return c0 + cx * x + cy * y

    return fn


def _curve(spec) -> ConvexCurve:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ScenarioError("curve", "must be an object with a type")
    center = _vector(spec, "center", 2, np.zeros(2))
    kind = spec["type"]
    if kind == "circle":
        return make_circle(_number(spec, "R", 1.0, lo=0, strict_lo=True), tuple(center))
    if kind == "ellipse":
        a = _number(spec, "a", required=True, lo=0, strict_lo=True)
        b = _number(spec, "b", required=True, lo=0, strict_lo=True)
        return make_ellipse(a, b, tuple(center))
    raise ScenarioError("curve.type", f"unknown curve {kind!r}; expected circle or ellipse")


# Scenario --------------------------------------------------------------------

@dataclass
class Scenario:
    doc: dict
    experiment: str
    model: str
    seed: int
    tol: float
    system: Optional[ForcedSystem] = None
    curve: Optional[ConvexCurve] = None
    law: Optional[RotationLaw] = None
    f: Optional[Forcing] = None
    g: Optional[OscillatoryForcing] = None

    @property
    def dim(self) -> int:
        return 2

    @property
    def labels(self):
        return ("t", "x", "y") if self.model == "strip" else ("t", "q", "v")

    def get(self, key, default=None):
        return self.doc.get(key, default)


def _oscillatory(doc):
    lam = _number(doc, "lambda", 1.0)
    if lam <= 0:
        raise ScenarioError("lambda", f"must be > 0, got {lam:g}")
    fn = parse_catalog(doc.get("g", "zero"), "g")
    if abs(fn.mean) > 1e-12:
        raise ScenarioError("g", f"must have zero mean, got mean {fn.mean:g}")
    return OscillatoryForcing.from_catalog(fn, lam)


def _mollifier_delta(doc):
    spec = doc.get("mollifier")
    if spec is None or spec is False:
        return None
    if spec is True:
        return 0.05
    if isinstance(spec, dict) and set(spec) <= {"delta"}:
        return _number(spec, "delta", 0.05, lo=0, strict_lo=True)
    raise ScenarioError("mollifier", "must be true, false, null or {\"delta\": number}")


def load_scenario(doc: dict, seed_override: Optional[int] = None) -> Scenario:
    """Validate ``doc`` and build the model objects it describes.

    Raises
    ------
    ScenarioError
        Unknown keys or names, missing fields, or numbers out of range.
    """
    if not isinstance(doc, dict):
        raise ScenarioError("scenario", "must be a JSON object")
    doc = copy.deepcopy(doc)
    experiment = doc.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ScenarioError("experiment", f"must be one of {list(EXPERIMENTS)}, got {experiment!r}")
    model = doc.get("model")
    if model not in MODELS:
        raise ScenarioError("model", f"must be one of {list(MODELS)}, got {model!r}")
    if experiment == "curve-info" and model != "rotating_curve":
        raise ScenarioError("model", "curve-info needs the rotating_curve model")
    unknown = set(doc) - _COMMON - _MODEL_KEYS[model] - _EXPERIMENT_KEYS[experiment]
    if unknown:
        raise ScenarioError(sorted(unknown)[0], f"unknown key for {model}/{experiment}")
    if seed_override is not None:
        doc["seed"] = seed_override
    seed = _integer(doc, "seed", 0, lo=0)
    doc["seed"] = seed
    tol = _number(doc, "tol", 1e-10, lo=TOL_RANGE[0], hi=TOL_RANGE[1])
    if "name" in doc and not isinstance(doc["name"], str):
        raise ScenarioError("name", "must be a string")
    if "out_dir" in doc and not isinstance(doc["out_dir"], str):
        raise ScenarioError("out_dir", "must be a string")

    sc = Scenario(doc, experiment, model, seed, tol)
    delta = _mollifier_delta(doc)
    g = _oscillatory(doc)
    sc.g = g
    if model == "pendulum":
        sc.f = Forcing.from_catalog(parse_catalog(doc.get("f", "zero"), "f"))
        sigma = pendulum_mollifier(delta) if delta else None
        sc.system = pendulum_system(sc.f, g, sigma)
    elif model == "strip":
        margin = _number(doc, "margin", 0.0, lo=0)
        v = _affine(doc.get("v", {}), "v")
        w = _affine(doc.get("w", {"y": 1.0}), "w")
        strip = StripSystem(v, w, g, margin)
        if not strip.check_margin():
            raise ScenarioError("w", f"needs w(x, 1) > {margin:g} and w(x, -1) < -{margin:g}")
        sigma = strip_mollifier(delta) if delta else None
        sc.system = strip_system(strip, sigma)
    else:
        sc.curve = _curve(doc.get("curve", {"type": "circle"}))
        c = _number(doc, "rotation_c", None, lo=0)
        sc.law = RotationLaw.from_catalog(parse_catalog(doc.get("rotation", 0.0), "rotation"), c)
        if not sc.law.check():
            raise ScenarioError("rotation_c", f"{sc.law.c:g} does not bound |phi'| and |phi''|")
        sigma = curve_mollifier(sc.curve, sc.law, delta) if delta else None
        sc.system = rotating_curve_system(sc.curve, sc.law, g, sigma)
    _check_experiment(sc)
    return sc


def _check_experiment(sc: Scenario):
    doc = sc.doc
    if sc.experiment == "simulate":
        _vector(doc, "ic", sc.dim, required=True)
        _number(doc, "t0", 0.0)
        _number(doc, "t_max", required=True, lo=0, strict_lo=True)
        if "samples" in doc:
            _integer(doc, "samples", 2, lo=2)
        if not isinstance(doc.get("stop_on_exit", False), bool):
            raise ScenarioError("stop_on_exit", "must be a boolean")
    elif sc.experiment == "survive":
        _number(doc, "t0", 0.0)
        _number(doc, "t_max", required=True, lo=0, strict_lo=True)
        _number(doc, "xi_tol", 1e-12, lo=XI_TOL_RANGE[0], hi=XI_TOL_RANGE[1])
        _integer(doc, "transversality_points", 41, lo=1)
        seg = doc.get("segment")
        if seg is not None:
            if not isinstance(seg, dict) or set(seg) != {"a", "b"}:
                raise ScenarioError("segment", "must be an object with keys a and b")
            _vector(seg, "a", sc.dim, required=True)
            _vector(seg, "b", sc.dim, required=True)
    elif sc.experiment == "average":
        _vector(doc, "ic", sc.dim, required=True)
        _number(doc, "t0", 0.0)
        _number(doc, "horizon", required=True, lo=0, strict_lo=True)
        lams = doc.get("lambdas")
        if (not isinstance(lams, list) or len(lams) < 4
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in lams)):
            raise ScenarioError("lambdas", "must be a list of at least 4 numbers")
        if any(x <= 0 for x in lams):
            raise ScenarioError("lambdas", "must all be > 0")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ScenarioError("lambdas", "must be strictly increasing")
        if sc.g is None or sc.g.is_zero:
            raise ScenarioError("g", "averaging needs a non-zero oscillatory forcing")
    elif sc.experiment == "periodic":
        _number(doc, "T", None, lo=0, strict_lo=True)
        _vector(doc, "ic", sc.dim)
        _number(doc, "newton_tol", 1e-10, lo=1e-14, hi=1e-2)
        bounds = doc.get("bounds")
        if bounds is not None:
            if sc.model != "pendulum":
                raise ScenarioError("bounds", "upper/lower checks are available for the pendulum")
            if not isinstance(bounds, dict) or set(bounds) != {"alpha", "beta"}:
                raise ScenarioError("bounds", "must be an object with keys alpha and beta")
            _number(bounds, "alpha", required=True)
            _number(bounds, "beta", required=True)
    else:
        _integer(doc, "phi_points", 64, lo=1)
