"""Command-line front end: ``oscillab run scenario.json [--out DIR] [--seed N] [--verbose]``.

Exit codes: 0 success, 2 invalid scenario, 3 numerical or IO failure. A
``manifest.json`` is written in every case that gets as far as an output
directory.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .averaging import convergence_study
from .curves import curve_constants, rotation_condition, vertical_tangent_points
from .errors import OscillabError
from .io import emit_trajectory, write_csv, write_json
from .ode import State, integrate, integrate_with_exit
from .periodic import (UpperLowerPair, find_periodic_with_fallback, forced_period,
                       orbit_between, verify_upper_lower)
from .scenario import Scenario, ScenarioError, load_scenario
from .wazewski import (Segment, bisect_survivor, curve_segment, pendulum_segment,
                       strip_segment, verify_transversality)

__all__ = ["main", "run", "EXIT_OK", "EXIT_INVALID", "EXIT_FAILED"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3
FORMAT_VERSION = 1

log = logging.getLogger("oscillab")


def _ic(sc: Scenario, key="ic"):
    return State(float(sc.get("t0", 0.0)), np.array(sc.doc[key], dtype=float))


def _run_simulate(sc: Scenario, out: Path):
    fld = sc.system.field()
    ic = _ic(sc)
    t1 = ic.t + float(sc.doc["t_max"])
    summary = {}
    if sc.get("stop_on_exit", False):
        rep = integrate_with_exit(fld, ic, t1, sc.system.window, sc.tol)
        traj = rep.trajectory
        summary.update(outcome=str(rep.outcome), t_exit=rep.t_exit, near_grazes=rep.near_grazes)
    else:
        traj = integrate(fld, ic, t1, sc.tol)
    times = None
    if "samples" in sc.doc:
        times = np.linspace(traj.t0, traj.t1, int(sc.doc["samples"]))
    path = emit_trajectory(traj, out / "trajectory.csv", sc.labels[1:], times)
    summary.update(t_final=traj.t1, y_final=traj.y[-1], steps=len(traj))
    write_json(out / "result.json", summary)
    return summary, [path.name, "result.json"]


def _default_segment(sc: Scenario, t0: float) -> Segment:
    seg = sc.get("segment")
    if seg is not None:
        return Segment.between(seg["a"], seg["b"], t0)
    if sc.model == "pendulum":
        return pendulum_segment(t0)
    if sc.model == "strip":
        return strip_segment(t0)
    return curve_segment(sc.curve, sc.law, t0)


def _run_survive(sc: Scenario, out: Path):
    fld = sc.system.field()
    window = sc.system.window
    t0 = float(sc.get("t0", 0.0))
    t_max = float(sc.doc["t_max"])
    xi_tol = float(sc.get("xi_tol", 1e-12))
    cert = bisect_survivor(fld, _default_segment(sc, t0), window, t_max, xi_tol, sc.tol)
    check = cert.verify(fld, window)
    traj = cert.star_report.trajectory
    td, yd = traj.dense()
    grid = np.linspace(t0, t0 + t_max, int(sc.get("transversality_points", 41)))
    free = {0: tuple(sc.system.box[0])} if sc.model == "strip" else None
    trans = verify_transversality(sc.system.unforced(), window, grid, free_ranges=free)
    doc = cert.to_dict()
    doc["verification"] = {"tol": max(cert.tol * 0.1, 1e-13), "outcome": str(check.outcome),
                           "survival_time": check.survival_time - t0}
    doc["dense_inside"] = window.contains(td, yd[:, window.coord])
    doc["transversality"] = trans.to_dict()
    write_json(out / "certificate.json", doc)
    write_csv(out / "exit_log.csv", ("xi", "outcome", "t_exit"), cert.log_rows())
    emit_trajectory(traj, out / "trajectory.csv", sc.labels[1:])
    summary = {"star_outcome": str(cert.star_outcome), "ic_star": cert.ic_star.y,
               "verified_survival_time": check.survival_time - t0,
               "n_probes": cert.n_probes, "transversality_inward": trans.inward}
    return summary, ["certificate.json", "exit_log.csv", "trajectory.csv"]


def _run_average(sc: Scenario, out: Path):
    rep = convergence_study(sc.system, sc.doc["lambdas"], _ic(sc), float(sc.doc["horizon"]),
                            sc.tol, sc.seed)
    write_json(out / "report.json", rep.to_dict())
    write_csv(out / "deviations.csv", ("lambda", "deviation"), rep.rows())
    summary = {"fitted_order": rep.fitted_order, "deviations": rep.deviations}
    return summary, ["report.json", "deviations.csv"]


def _run_periodic(sc: Scenario, out: Path):
    T = sc.get("T")
    if T is None:
        T = forced_period(sc.f, sc.g, sc.law)
    T = float(T)
    seed = State(0.0, sc.doc["ic"]) if sc.get("ic") is not None else None
    orbit = find_periodic_with_fallback(sc.system.field(), T, seed, sc.system.window,
                                        float(sc.get("newton_tol", 1e-10)),
                                        segment=_default_segment(sc, 0.0))
    doc = orbit.to_dict()
    bounds = sc.get("bounds")
    if bounds is not None:
        f_fn, g = sc.f.f, sc.g
        lam = g.lam

        def rhs(t, u):
            return float(f_fn(t)) * math.sin(u) - (1.0 + float(g.g(lam * t))) * math.cos(u)

        pair = UpperLowerPair.constant(bounds["alpha"], bounds["beta"], T)
        check = verify_upper_lower(rhs, pair).to_dict()
        check["orbit_between"] = orbit_between(orbit, pair)
        doc["upper_lower"] = check
    write_json(out / "orbit.json", doc)
    ts, ys = orbit.samples()
    write_csv(out / "orbit.csv", sc.labels, (np.concatenate([[t], y]) for t, y in zip(ts, ys)))
    summary = {"residual": orbit.residual, "determinant": orbit.determinant,
               "window_ok": orbit.window_ok, "period": T}
    return summary, ["orbit.json", "orbit.csv"]


def _run_curve_info(sc: Scenario, out: Path):
    curve, law = sc.curve, sc.law
    m1, m2 = curve_constants(curve)
    n = int(sc.get("phi_points", 64))
    phis = 2 * math.pi * np.arange(n) / n
    table = [(phi,) + tuple(vertical_tangent_points(curve, phi)) for phi in phis]
    doc = {"curve": repr(curve), "total_length": curve.total_length, "m1": m1, "m2": m2,
           "rotation_c": law.c, "rotation_condition": rotation_condition(law.c, m1, m2),
           "vertical_points": [{"phi": p, "s1": a, "s2": b} for p, a, b in table]}
    write_json(out / "curve_info.json", doc)
    write_csv(out / "vertical_points.csv", ("phi", "s1", "s2"), table)
    summary = {"total_length": curve.total_length, "m1": m1, "m2": m2}
    return summary, ["curve_info.json", "vertical_points.csv"]


RUNNERS = {
    "simulate": _run_simulate,
    "survive": _run_survive,
    "average": _run_average,
    "periodic": _run_periodic,
    "curve-info": _run_curve_info,
}


def _versions():
    return {"oscillab": __version__, "format": FORMAT_VERSION, "numpy": np.__version__,
            "scipy": scipy.__version__}


def run(scenario_path, out_dir=None, seed=None) -> int:
    """Run one scenario file; returns the exit code."""
    started = time.perf_counter()
    manifest = {"versions": _versions(), "scenario_file": str(scenario_path), "outputs": []}
    doc = None
    out = Path(out_dir) if out_dir is not None else None
    code = EXIT_OK
    try:
        try:
            with open(scenario_path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError("scenario", f"not valid JSON ({exc})") from exc
        if out is None:
            out = Path(doc.get("out_dir", "out")) if isinstance(doc, dict) else Path("out")
        out.mkdir(parents=True, exist_ok=True)
        sc = load_scenario(doc, seed)
        manifest["scenario"] = sc.doc
        log.info("running %s/%s", sc.model, sc.experiment)
        summary, files = RUNNERS[sc.experiment](sc, out)
        manifest["outputs"] = files
        manifest["summary"] = summary
        manifest["status"] = "ok"
    except ScenarioError as exc:
        code = EXIT_INVALID
        print(f"oscillab: invalid scenario: {exc}", file=sys.stderr)
        manifest["error"] = {"type": "ScenarioError", "field": exc.field, "message": str(exc)}
    except (OscillabError, OSError) as exc:
        code = EXIT_FAILED
        print(f"oscillab: {type(exc).__name__}: {exc}", file=sys.stderr)
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except ValueError as exc:
        code = EXIT_INVALID
        print(f"oscillab: invalid scenario: {exc}", file=sys.stderr)
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc)}
    manifest.setdefault("scenario", doc)
    manifest["status"] = "ok" if code == EXIT_OK else "error"
    manifest["exit_code"] = code
    manifest["wall_clock_s"] = time.perf_counter() - started
    if out is None:
        out = Path("out")
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "manifest.json", manifest)
    except OSError as exc:
        print(f"oscillab: cannot write manifest: {exc}", file=sys.stderr)
        code = code or EXIT_FAILED
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="oscillab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario", help="scenario JSON file")
    p_run.add_argument("--out", default=None, help="output directory (default: scenario out_dir or ./out)")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--verbose", action="store_true", help="log progress to stderr")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    return run(args.scenario, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
