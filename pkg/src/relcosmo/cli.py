"""Command-line front end.

Commands: ``catalog``, ``verify``, ``evolve``, ``redshift``, ``godel-ctc`` and
``kinematics``.  Every command writes CSV (default) or JSON to standard
output or ``--output``; floats carry 17 significant digits, summary lines
start with ``#``.  The exit status is 0 exactly when every checked tolerance
passes, 1 when a check fails and 2 on usage or input errors.

The random seed for event sampling comes from the ``COSMO_SEED``
environment variable when set, else ``--seed``, else 0.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import catalog as cat
from .causal import ctc_scan, kinematic_decomposition, killing_residual
from .curvature import covariant_divergence, curvature_at, efe_residual
from .errors import InconsistentInitialDataError, RelCosmoError, UnknownEntryError
from .flrw import Dust, FLRWParams, age_bound_check, first_integral, fmt, integrate_scale_factor
from .optics import distance_redshift_table, hubble_constant, hubble_fit, table_csv


@dataclass
class RunConfig:
    c: float = 1.0
    G: float = 1.0
    output: Optional[str] = None
    format: str = "csv"
    seed: int = 0
    tolerances: dict = field(default_factory=dict)

    def tol(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))


class CLIError(Exception):
    pass


def _jsonify(v):
    if isinstance(v, dict):
        return {k: _jsonify(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonify(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def render(columns: Sequence[str], rows: Sequence[Sequence], summary: dict, config: RunConfig,
           extra_tables: Optional[dict] = None) -> str:
    if config.format == "json":
        doc = {"columns": list(columns), "rows": [list(r) for r in rows], "summary": summary}
        if extra_tables:
            doc["tables"] = extra_tables
        return json.dumps(_jsonify(doc), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    for name, table in (extra_tables or {}).items():
        buf.write(f"# table {name}\n")
        w.writerow(table["columns"])
        for r in table["rows"]:
            w.writerow([_cell(v) for v in r])
    for k in sorted(summary):
        buf.write(f"# {k}={_cell(summary[k])}\n")
    return buf.getvalue()


def _emit(text: str, config: RunConfig) -> None:
    if config.output:
        with open(config.output, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_params(pairs: Sequence[str]) -> dict:
    out = {}
    for p in pairs or ():
        if "=" not in p:
            raise CLIError(f"--param expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        try:
            out[k] = int(v) if v.lstrip("-").isdigit() else float(v)
        except ValueError:
            out[k] = v
    return out


def _entry_params(args, name: str) -> dict:
    params = _parse_params(getattr(args, "param", None))
    if getattr(args, "a", None) is not None:
        params["a"] = args.a
    key = cat.canonical_name(name)
    if key not in ("weak_field", "flrw", "friedman_dust", "bianchi", "minkowski", "rotating_frame", "godel",
                   "einstein_static", "de_sitter_static", "de_sitter_cosh", "steady_state"):
        return params
    params.setdefault("c", args.c)
    params.setdefault("G", args.G)
    if key in ("minkowski", "rotating_frame", "weak_field", "flrw", "friedman_dust") and "a" in params:
        params.pop("a")
    return params


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_catalog(args, config: RunConfig) -> int:
    entries = [cat.make_entry(n, c=config.c, G=config.G) for n in cat.ENTRY_NAMES]
    _emit(cat.catalog_json(entries) + "\n", config)
    return 0


def cmd_verify(args, config: RunConfig) -> int:
    names = cat.ENTRY_NAMES if args.metric in (None, "all") else [cat.canonical_name(args.metric)]
    rng = np.random.default_rng(config.seed)
    efe_tol = config.tol("efe", 1e-8 if args.method != "numeric" else 1e-5)
    # finite differences of finite-difference curvature carry ~1e-5 noise
    bianchi_tol = config.tol("bianchi", 1e-6 if args.method != "numeric" else 1e-3)
    flat_tol = config.tol("riemann", 1e-8)
    rows = []
    ok_all = True
    for name in names:
        entry = cat.make_entry(name, **_entry_params(args, name))
        events = cat.sample_events(entry, args.n_events, rng)
        src = entry.source
        efe = max(efe_residual(entry.spec, src.Lambda, src.T, x, entry.c, entry.G, method=args.method).max_abs
                  for x in events)
        riem = max(float(np.max(np.abs(curvature_at(entry.spec, x, args.method).riemann.R))) for x in events)

        def lhs(p, spec=entry.spec, L=src.Lambda):
            cur = curvature_at(spec, p, args.method)
            return cur.einstein + L * cur.g

        nb = min(args.n_events, args.n_bianchi)
        bian = max(float(np.max(np.abs(covariant_divergence(lhs, entry.spec, x)))) for x in events[:nb])
        flat = riem <= flat_tol
        passed = efe <= efe_tol and bian <= bianchi_tol and (flat or not entry.notes.get("flat", False))
        ok_all &= passed
        rows.append((entry.name, efe, bian, riem, flat, passed))
    summary = {"all_pass": ok_all, "efe_tol": efe_tol, "bianchi_tol": bianchi_tol, "riemann_tol": flat_tol,
               "seed": config.seed, "n_events": args.n_events, "method": args.method}
    _emit(render(["name", "efe_max", "bianchi_max", "riemann_max", "flat", "pass"], rows, summary, config), config)
    return 0 if ok_all else 1


def cmd_evolve(args, config: RunConfig) -> int:
    params = FLRWParams(args.k, args.Lambda, config.c, config.G, Dust(args.A))
    if args.da0 is None:
        v2 = (args.A + args.Lambda * args.a0**3 / 3.0) / args.a0 - args.k
        if v2 < 0:
            raise CLIError("no real expansion rate satisfies the first integral for these inputs")
        da0 = config.c * math.sqrt(v2) * (1 if args.direction == "expanding" else -1)
    else:
        da0 = args.da0
    traj = integrate_scale_factor(params, args.t0, args.a0, da0, tuple(args.span), n_samples=args.samples)
    rows = [(t, a, v, r, flag) for t, a, v, r, flag in traj.rows()]
    drift = traj.first_integral_drift()
    fi_tol = config.tol("first_integral", 1e-8)
    sings = traj.singularities()
    turning = traj.turning_points()
    H0 = da0 / args.a0
    summary = {
        "first_integral_drift": drift,
        "first_integral_pass": drift <= fi_tol,
        "singularities": ";".join(fmt(e.t) for e in sings) or "none",
        "turning_points": ";".join(fmt(e.t) for e in turning) or "none",
        "max_a": float(max([traj.a.max()] + [e.a for e in turning])),
        "hubble_time_at_t0": (1.0 / H0) if H0 != 0 else math.inf,
    }
    passed = drift <= fi_tol
    bangs = [e.t for e in sings if e.da_dt > 0]
    if bangs and params.Lambda <= 0 and H0 > 0:
        holds, worst, n = age_bound_check(traj)
        age = args.t0 - min(bangs)
        summary["t_bang"] = min(bangs)
        summary["age_at_t0"] = age
        age_ok = holds and age <= 1.0 / H0
        summary["age_bound"] = "PASS" if age_ok else "FAIL"
        summary["age_bound_worst_margin"] = worst
        passed &= age_ok
    else:
        summary["age_bound"] = "N/A"
    summary["all_pass"] = passed
    _emit(render(["t", "a", "da_dt", "rho", "event_flag"], rows, summary, config), config)
    return 0 if passed else 1


def _scale_model(args, c: float):
    if args.model == "power":
        a0, t0, n = args.a0, args.t0, args.n

        def a(t):
            return a0 * (t / t0) ** n
        return a, args.t0
    if args.model == "cosh":
        R = args.a0

        def a(t):
            return R * np.cosh(c * t / R)
        return a, args.t0
    if args.model == "exp":
        H = args.H

        def a(t):
            return args.a0 * np.exp(H * t)
        return a, args.t0
    if args.model == "static":
        def a(t):
            return args.a0 + 0.0 * t
        return a, args.t0
    if args.model == "dust":
        entry = cat.friedman_dust(A=args.A, k=args.k, Lambda=args.Lambda, c=c, G=args.G)
        traj = entry.extra["trajectory"]
        t_lo, t_hi = traj.t_range
        if not t_lo < args.t0 < t_hi:
            raise CLIError(f"t0 = {args.t0} outside the model lifetime ({t_lo}, {t_hi})")
        return entry.extra["scale"], args.t0
    raise CLIError(f"unknown model {args.model!r}")


def cmd_redshift(args, config: RunConfig) -> int:
    a, t0 = _scale_model(args, config.c)
    H0 = hubble_constant(a, t0)
    if args.emitters:
        emitters = list(args.emitters)
    else:
        if H0 > 0:
            dt_max = args.z_max / H0
        else:
            dt_max = 1.0
        emitters = list(t0 - np.linspace(0.0, dt_max, args.n_emitters))
    for te in emitters:
        if te > t0:
            raise CLIError(f"emitter time {te} is outside the span (later than t0 = {t0})")
    try:
        rows = distance_redshift_table(a, t0, emitters, config.c)
    except RelCosmoError as exc:
        raise CLIError(f"emitter outside the span: {exc}") from None
    fit = hubble_fit(rows, H0, config.c, z_max=args.z_max)
    summary = {"H0": H0, "H0_over_c": H0 / config.c, "fitted_slope": fit.slope, "fit_rel_error": fit.rel_error,
               "n_fit": fit.n}
    tol = config.tol("hubble", 0.01)
    if fit.n == 0:
        passed = all(abs(r[3]) <= 1e-12 for r in rows)
    else:
        passed = fit.rel_error <= tol
    summary["all_pass"] = passed
    _emit(render(["t_e", "chi", "D", "z", "z_hubble_approx"], rows, summary, config), config)
    return 0 if passed else 1


def cmd_godel_ctc(args, config: RunConfig) -> int:
    grid = tuple(args.grid)
    if min(grid) < 1:
        raise CLIError("empty grid")
    scan = ctc_scan(args.a, tuple(args.A_range) if args.A_range else None,
                    tuple(args.B_range) if args.B_range else None, grid, n_grid=args.tau_panels,
                    margin=config.tol("ctc_margin", 1e-10), workers=args.workers)
    rows = [(cell.A, cell.B, int(cell.accepted), cell.reason, cell.min_margin) for cell in scan.cells]
    box = scan.bounding_box()
    summary = {"accepted_cells": int(scan.accepted.sum()), "nonempty": scan.nonempty(),
               "bounding_box": "none" if box is None else ";".join(fmt(v) for v in box), "a": args.a}
    _emit(render(["A", "B", "accepted", "failure_reason", "min_margin"], rows, summary, config), config)
    return 0


def cmd_kinematics(args, config: RunConfig) -> int:
    name = cat.canonical_name(args.metric)
    entry = cat.make_entry(name, **_entry_params(args, name))
    observer = args.observer or sorted(entry.observers)[0]
    if observer not in entry.observers:
        raise CLIError(f"unknown observer field {observer!r} for {name}; known: {', '.join(sorted(entry.observers))}")
    u = entry.observers[observer]
    rng = np.random.default_rng(config.seed)
    events = cat.sample_events(entry, args.n_events, rng)
    tol = config.tol("kinematics", 1e-6)
    ktol = config.tol("killing", 1e-7)
    rows = []
    worst = 0.0
    for x in events:
        kd = kinematic_decomposition(u, entry.spec, x)
        nrm = kd.norms(entry.spec.eval(x))
        worst = max(worst, kd.residual)
        rows.append((*[float(v) for v in x], nrm["acceleration"], nrm["deformation"], nrm["rotation"],
                     nrm["expansion"], kd.residual))
    krows = []
    for kname in sorted(entry.killing):
        r = killing_residual(entry.killing[kname], entry.spec, events)
        krows.append((kname, r, r <= ktol))
    passed = worst <= tol and all(r[2] for r in krows)
    summary = {"metric": name, "observer": observer, "max_decomposition_residual": worst,
               "killing_all_pass": all(r[2] for r in krows), "all_pass": passed, "seed": config.seed}
    cols = ["x0", "x1", "x2", "x3", "acceleration", "deformation", "rotation", "expansion", "residual"]
    extra = {"killing": {"columns": ["field", "residual", "pass"], "rows": krows}}
    _emit(render(cols, rows, summary, config, extra), config)
    return 0 if passed else 1


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=float, default=1.0, help="speed of light (default 1)")
    common.add_argument("--G", type=float, default=1.0, help="gravitational constant (default 1)")
    common.add_argument("--output", "-o", help="write to this file instead of standard output")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=None, help="seed for event sampling")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override a tolerance (efe, bianchi, riemann, first_integral, hubble, killing, ...)")

    p = argparse.ArgumentParser(prog="relcosmo", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", parents=[common], help="list catalog entries as JSON")

    v = sub.add_parser("verify", parents=[common], help="field equations, Bianchi identity, flatness")
    v.add_argument("--metric", default="all")
    v.add_argument("--a", type=float, default=None)
    v.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    v.add_argument("--n-events", type=int, default=20)
    v.add_argument("--n-bianchi", type=int, default=5)
    v.add_argument("--method", choices=("auto", "analytic", "numeric"), default="auto")

    e = sub.add_parser("evolve", parents=[common], help="integrate a dust FLRW model")
    e.add_argument("--k", type=int, default=1, choices=(-1, 0, 1))
    e.add_argument("--Lambda", type=float, default=0.0)
    e.add_argument("--A", type=float, default=1.0)
    e.add_argument("--t0", type=float, default=0.0)
    e.add_argument("--a0", type=float, default=0.5)
    e.add_argument("--da0", type=float, default=None, help="da/dt at t0 (default: from the first integral)")
    e.add_argument("--direction", choices=("expanding", "contracting"), default="expanding")
    e.add_argument("--span", type=float, nargs=2, default=(-100.0, 100.0))
    e.add_argument("--samples", type=int, default=401)

    r = sub.add_parser("redshift", parents=[common], help="distance-redshift table and Hubble fit")
    r.add_argument("--model", choices=("power", "cosh", "exp", "static", "dust"), default="power")
    r.add_argument("--a0", type=float, default=1.0)
    r.add_argument("--t0", type=float, default=1.0)
    r.add_argument("--n", type=float, default=2.0 / 3.0, help="exponent of the power law")
    r.add_argument("--H", type=float, default=1.0, help="rate of the exponential model")
    r.add_argument("--A", type=float, default=1.0)
    r.add_argument("--k", type=int, default=1)
    r.add_argument("--Lambda", type=float, default=0.0)
    r.add_argument("--emitters", type=float, nargs="*", default=None)
    r.add_argument("--n-emitters", type=int, default=21)
    r.add_argument("--z-max", type=float, default=0.01)

    g = sub.add_parser("godel-ctc", parents=[common], help="scan the closed-curve family")
    g.add_argument("--a", type=float, default=1.0)
    g.add_argument("--grid", type=int, nargs=2, default=(41, 41))
    g.add_argument("--A-range", type=float, nargs=2, default=None)
    g.add_argument("--B-range", type=float, nargs=2, default=None)
    g.add_argument("--tau-panels", type=int, default=720)
    g.add_argument("--workers", type=int, default=1)

    k = sub.add_parser("kinematics", parents=[common], help="observer kinematics and Killing residuals")
    k.add_argument("--metric", required=True)
    k.add_argument("--observer", default=None)
    k.add_argument("--a", type=float, default=None)
    k.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    k.add_argument("--n-events", type=int, default=10)
    return p


_COMMANDS = {"catalog": cmd_catalog, "verify": cmd_verify, "evolve": cmd_evolve, "redshift": cmd_redshift,
             "godel-ctc": cmd_godel_ctc, "kinematics": cmd_kinematics}


def resolve_seed(flag: Optional[int]) -> int:
    """``COSMO_SEED`` overrides ``--seed``, which overrides the default 0."""
    env = os.environ.get("COSMO_SEED")
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError:
            raise CLIError(f"COSMO_SEED must be an integer, got {env!r}") from None
    return 0 if flag is None else flag


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if not (args.c > 0 and args.G > 0):
            raise CLIError("c and G must be positive")
        config = RunConfig(args.c, args.G, args.output, args.format, resolve_seed(args.seed),
                           {k: float(v) for k, v in _parse_params(args.tol).items()})
        return _COMMANDS[args.command](args, config)
    except UnknownEntryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InconsistentInitialDataError as exc:
        print(f"error: inconsistent initial data, first-integral residual {exc.residual:.6e}: {exc}",
              file=sys.stderr)
        return 2
    except (CLIError, RelCosmoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
