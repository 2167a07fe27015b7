"""Command-line front end.

Subcommands: energy, bound, fenchel, verify, sweep, minimize.  Curves are
builtin fixtures (``circle``, ``ellipse:a:b``, ``perturbed:mode:eps``,
``trefoil``) or paths to a JSON file written by ``FourierCurve.to_json``.
``--config FILE`` loads a JSON object whose keys mirror the long flags;
explicit flags override it.

Exit codes: 0 success, 1 invalid input, 2 divergent energy, 3 failed check.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .bounds import classify_region, tp_lower_bound, willmore_lower_bound
from .curves import (
    FourierCurve,
    make_circle,
    parse_fixture,
    rescale_to_length,
    resample_arclength,
    sample,
)
from .energies import EnergySpec, evaluate, g_energy, f_energy, tp_energy, wirtinger_check, willmore_fractional
from .gaussmap import fenchel_report
from .jsonio import dumps, write_csv
from .minimize import MinimizeConfig, descend
from .quadrature import QuadratureSpec, parse_quad

__all__ = ["main", "build_parser", "load_curve", "CheckResult", "run_checks", "VERIFY_GROUPS", "sweep_rows"]

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED, EXIT_CHECK_FAILED = 0, 1, 2, 3
CLI_KINDS = ("TP", "TPClassic", "G", "GSliceW", "F", "FSliceU", "Willmore")
SWEEP_FIELDS = ["p", "q", "region_flags", "bound", "tp_circle", "tp_fixture", "slack", "status"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which would collide with the divergence code
    def error(self, message):
        raise UsageError(message)


# shared helpers ----------------------------------------------------------


def load_curve(source: str, length: Optional[float] = None) -> FourierCurve:
    """Fixture name or JSON path, optionally rescaled to ``length``."""
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            curve = FourierCurve.from_json(fh.read())
    else:
        curve = parse_fixture(source)
    if length is not None:
        curve = rescale_to_length(curve, float(length))
    return curve


def _quad(args, base: Optional[QuadratureSpec] = None) -> QuadratureSpec:
    base = base or QuadratureSpec()
    if args.rounds is not None:
        base = QuadratureSpec(
            N_u=base.N_u,
            N_w=base.N_w,
            grading_exponent=base.grading_exponent,
            doubling_rounds=int(args.rounds),
            convergence_rtol=base.convergence_rtol,
            rule=base.rule,
        )
    if args.quad is None:
        return base
    return parse_quad(str(args.quad), base)


def _spec(args) -> EnergySpec:
    if args.willmore or args.kind == "Willmore":
        return EnergySpec(kind="Willmore", p=float(args.wp), s=float(args.s))
    return EnergySpec(kind=args.kind, p=float(args.p), q=float(args.q), s=float(args.s), slice_value=float(args.slice))


def _samples(curve: FourierCurve, N: int, arclength: bool):
    return resample_arclength(curve, N) if arclength else sample(curve, N)


def _floats(value) -> List[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if v.strip()]


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _as_text(obj, fmt: str, fields=None) -> str:
    if fmt == "csv":
        rows = obj if isinstance(obj, list) else [obj]
        return write_csv(rows, fields or list(rows[0].keys()))
    return dumps(obj) + "\n"


# energy / bound / fenchel -----------------------------------------------


def run_energy(args) -> int:
    spec = _spec(args)
    quad = _quad(args)
    curve = load_curve(args.curve, args.length)
    samples = _samples(curve, quad.N_u, args.arclength or spec.requires_arclength)
    result = evaluate(samples, spec, quad)
    if isinstance(result, float):
        _emit(_as_text({"kind": spec.kind, "p": spec.p, "q": spec.q, "value": result}, args.format), args.out)
        return EXIT_OK
    _emit(_as_text(result.to_dict(), args.format), args.out)
    return EXIT_OK if result.converged else EXIT_DIVERGED


def run_bound(args) -> int:
    L = 1.0 if args.length is None else float(args.length)
    if args.willmore:
        b = willmore_lower_bound(L, float(args.s), float(args.wp))
        out = {"formula": b.formula, "L": L, "s": float(args.s), "p": float(args.wp), "value": b.value}
    else:
        p, q = float(args.p), float(args.q)
        region = classify_region(p, q)
        out = {"formula": "tp_sharp", "L": L, "p": p, "q": q, "region_flags": region.sorted_flags()}
        try:
            out["value"] = tp_lower_bound(L, p, q).value
        except ValueError as exc:
            out["value"] = None
            out["note"] = str(exc)
    _emit(_as_text(out, args.format), args.out)
    return EXIT_OK


def run_fenchel(args) -> int:
    quad = _quad(args)
    curve = load_curve(args.curve, args.length)
    report = fenchel_report(curve, quad.N_u, arclength=True)
    _emit(_as_text(report.to_dict(), args.format), args.out)
    return EXIT_OK


# verify ------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.tol

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.group}/{self.name}  residual={self.residual:.3e}  tol={self.tol:.3e}"


def _rel(a, b):
    return abs(a - b) / abs(b)


def _check_homogeneity(quad):
    out = []
    ell = rescale_to_length(parse_fixture("ellipse:2:1"), 1.0)
    for p, q in ((4.0, 2.0), (3.0, 2.0)):
        base = tp_energy(sample(ell, quad.N_u), p, q, quad).value
        for lam in (0.5, 2.0):
            scaled = tp_energy(sample(ell.scaled(lam), quad.N_u), p, q, quad).value
            expected = lam ** (q + 2.0 - p) * base
            out.append(CheckResult("homogeneity", f"TP({p:g},{q:g}) lambda={lam:g}", _rel(scaled, expected), 1e-12))
    return out


def _check_reparametrization(quad):
    out = []
    for name in ("ellipse:2:1", "perturbed:3:0.1"):
        curve = load_curve(name, 1.0)
        a = tp_energy(sample(curve, quad.N_u), 4.0, 2.0, quad)
        b = tp_energy(resample_arclength(curve, quad.N_u), 4.0, 2.0, quad)
        tol = 3.0 * (a.error_estimate + b.error_estimate) / abs(b.value)
        out.append(CheckResult("reparametrization", f"TP(4,2) {name}", _rel(a.value, b.value), tol))
    return out


def _check_minorants(quad):
    out = []
    for name in ("ellipse:2:1", "perturbed:3:0.1", "circle"):
        s = resample_arclength(load_curve(name, 1.0), quad.N_u)
        for label, lower_fn, p, q in (("G(4,2)<=TP(4,2)", g_energy, 4.0, 2.0), ("F(3,2)<=TP(3,2)", f_energy, 3.0, 2.0)):
            lo = lower_fn(s, p, q, quad)
            tp = tp_energy(s, p, q, quad)
            if name == "circle":
                out.append(CheckResult("minorant", f"{label} equality {name}", _rel(lo.value, tp.value), 1e-5))
            else:
                tol = 3.0 * (lo.error_estimate + tp.error_estimate) / abs(tp.value)
                out.append(CheckResult("minorant", f"{label} {name}", (lo.value - tp.value) / abs(tp.value), tol))
    return out


def _check_fenchel(quad):
    out = []
    for name in ("circle", "ellipse:2:1"):
        r = fenchel_report(load_curve(name, 1.0), quad.N_u)
        out.append(CheckResult("fenchel", f"path_u = 2pi {name}", abs(r.slack_u), 1e-4))
        out.append(CheckResult("fenchel", f"path_w = pi {name}", abs(r.slack_w), 1e-4))
    r = fenchel_report(load_curve("trefoil", 1.0), quad.N_u)
    out.append(CheckResult("fenchel", "path_u > 2pi + 0.01 trefoil", max(0.0, 0.01 - r.slack_u), 0.0))
    out.append(CheckResult("fenchel", "path_w > pi + 0.01 trefoil", max(0.0, 0.01 - r.slack_w), 0.0))
    # only the w-slack is gated for non-convex planar curves (see the decisions ledger)
    r = fenchel_report(load_curve("perturbed:3:0.3", 1.0), quad.N_u)
    out.append(CheckResult("fenchel", "path_w > pi + 0.01 perturbed:3:0.3", max(0.0, 0.01 - r.slack_w), 0.0))
    return out


def _check_wirtinger(quad):
    out = []
    lhs, rhs = wirtinger_check(resample_arclength(make_circle(1.0, 2), quad.N_u), 0.3)
    out.append(CheckResult("wirtinger", "equality circle", abs(lhs - rhs) / abs(rhs), 1e-10))
    lhs, rhs = wirtinger_check(resample_arclength(load_curve("ellipse:2:1", 1.0), quad.N_u), 0.3)
    out.append(CheckResult("wirtinger", "strict ellipse:2:1", max(0.0, 1e-4 - (rhs - lhs)), 0.0))
    return out


def _check_circle(quad):
    out = []
    circ = sample(make_circle(1.0, 2), quad.N_u)
    for p, q in ((4.0, 2.0), (3.0, 2.0), (2.0, 1.0), (5.0, 3.0)):
        v = tp_energy(circ, p, q, quad).value
        out.append(CheckResult("circle", f"TP({p:g},{q:g}) = bound", _rel(v, tp_lower_bound(1.0, p, q).value), 1e-6))
    w = willmore_fractional(circ, 0.5, 1.0, quad).value
    out.append(CheckResult("circle", "W(0.5,1) = bound", _rel(w, willmore_lower_bound(1.0, 0.5, 1.0).value), 1e-4))
    return out


VERIFY_GROUPS = {
    "homogeneity": _check_homogeneity,
    "reparametrization": _check_reparametrization,
    "minorant": _check_minorants,
    "fenchel": _check_fenchel,
    "wirtinger": _check_wirtinger,
    "circle": _check_circle,
}


def run_checks(quad: QuadratureSpec, only=None, strict: Optional[float] = None) -> List[CheckResult]:
    """Run the invariant suite; ``strict`` replaces every nonzero tolerance."""
    groups = list(VERIFY_GROUPS) if not only else list(only)
    unknown = [g for g in groups if g not in VERIFY_GROUPS]
    if unknown:
        raise ValueError(f"unknown check group(s) {unknown}; expected {list(VERIFY_GROUPS)}")
    results = []
    for g in groups:
        for r in VERIFY_GROUPS[g](quad):
            if strict is not None and r.tol > 0:
                r = CheckResult(r.group, r.name, r.residual, float(strict))
            results.append(r)
    return results


def run_verify(args) -> int:
    only = [s.strip() for s in args.only.split(",") if s.strip()] if args.only else None
    results = run_checks(_quad(args), only, args.strict)
    for r in results:
        print(r.line(), flush=True)
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failing invariant: {failed[0].group}/{failed[0].name}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(f"all {len(results)} checks passed")
    return EXIT_OK


# sweep -------------------------------------------------------------------


def _sweep_cell(task):
    p, q, curve_dict, L, quad = task
    row = {"p": p, "q": q, "region_flags": classify_region(p, q).sorted_flags()}
    try:
        row["bound"] = tp_lower_bound(L, p, q).value
    except ValueError:
        row["bound"] = math.nan
    status = "ok"
    try:
        circ = sample(rescale_to_length(make_circle(1.0, 2), L), quad.N_u)
        fix = sample(FourierCurve.from_dict(curve_dict), quad.N_u)
        tc = tp_energy(circ, p, q, quad)
        tf = tp_energy(fix, p, q, quad)
        row["tp_circle"], row["tp_fixture"] = tc.value, tf.value
        row["slack"] = tf.value - row["bound"]
        if not (tc.converged and tf.converged):
            status = "diverged"
    except ValueError as exc:
        row["tp_circle"] = row["tp_fixture"] = row["slack"] = math.nan
        status = f"error: {exc}"
    row["status"] = status
    return row


def sweep_rows(curve: FourierCurve, L: float, q_values, p_values=None, p_count: int = 5, quad=None, jobs: int = 1):
    """Rows in grid order; ``p`` spans ``[q+1, 2q+0.9]`` unless ``p_values`` is given."""
    quad = quad or QuadratureSpec()
    curve = rescale_to_length(curve, L)
    tasks = []
    for q in q_values:
        ps = p_values if p_values else np.linspace(q + 1.0, 2.0 * q + 0.9, p_count)
        tasks += [(round(float(p), 12), float(q), curve.to_dict(), L, quad) for p in ps]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_sweep_cell, tasks))
    return [_sweep_cell(t) for t in tasks]


def run_sweep(args) -> int:
    L = 1.0 if args.length is None else float(args.length)
    rows = sweep_rows(
        load_curve(args.curve),
        L,
        _floats(args.q_values),
        _floats(args.p_values) if args.p_values else None,
        int(args.p_count),
        _quad(args),
        int(args.jobs),
    )
    fmt = args.format or "csv"
    _emit(_as_text(rows, fmt, SWEEP_FIELDS), args.out)
    return EXIT_OK


# minimize ----------------------------------------------------------------


def _minimize_config(args) -> MinimizeConfig:
    d = MinimizeConfig()
    kw = {}
    for name in ("modes", "dims", "max_iters", "fd_order", "max_backtracks"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = int(v)
    for name in ("grad_step", "initial_step", "shrink", "armijo", "stop_grad_norm", "max_step"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = float(v)
    return MinimizeConfig(
        spec=_spec(args),
        target_length=1.0 if args.length is None else float(args.length),
        quad=_quad(args, d.quad),
        jobs=int(args.jobs),
        **kw,
    )


def run_minimize(args) -> int:
    config = _minimize_config(args)
    report = descend(load_curve(args.curve), config)
    csv_text = report.energies_csv()
    if args.format == "csv":
        _emit(csv_text, args.out)
    else:
        _emit(dumps(report.to_dict()) + "\n", args.out)
    csv_path = args.energies_csv or (args.out + ".energies.csv" if args.out and args.format != "csv" else None)
    if csv_path:
        _emit(csv_text, csv_path)
    return EXIT_OK


# parser ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, curve_default: Optional[str] = "circle"):
    p.add_argument("--config", help="JSON file whose keys mirror the long flags")
    p.add_argument("--curve", default=curve_default, help="fixture name[:args] or FourierCurve JSON path")
    p.add_argument("--length", type=float, default=None, help="rescale the curve to this length")
    p.add_argument("--quad", default=None, help="quadrature grid NU,NW[,G]")
    p.add_argument("--rounds", type=int, default=None, help="grid doublings in the convergence study")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def _energy_flags(p: argparse.ArgumentParser):
    p.add_argument("--kind", choices=CLI_KINDS, default="TP")
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--s", type=float, default=0.5, help="Willmore fractional order")
    p.add_argument("--wp", type=float, default=1.0, help="Willmore integrability exponent")
    p.add_argument("--willmore", action="store_true", help="shorthand for --kind Willmore")
    p.add_argument("--slice", type=float, default=0.5, help="slice position for GSliceW / FSliceU")
    p.add_argument("--arclength", action="store_true", help="sample at constant speed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tangentpoint", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("energy", help="evaluate an energy; exit 2 if the convergence study fails")
    _common(p)
    _energy_flags(p)
    p.set_defaults(func=run_energy)

    p = sub.add_parser("bound", help="sharp lower bound and (p, q) region flags")
    _common(p)
    _energy_flags(p)
    p.set_defaults(func=run_bound)

    p = sub.add_parser("fenchel", help="Gauss-map path-length minima")
    _common(p)
    p.set_defaults(func=run_fenchel)

    p = sub.add_parser("verify", help="run the invariant suite; exit 3 on the first failure")
    _common(p)
    p.add_argument("--only", default=None, help=f"comma-separated groups from {', '.join(VERIFY_GROUPS)}")
    p.add_argument("--strict", type=float, default=None, help="replace every nonzero tolerance")
    p.set_defaults(func=run_verify)

    p = sub.add_parser("sweep", help="(p, q) grid of bounds and energies as CSV")
    _common(p, "ellipse:2:1")
    p.add_argument("--q-values", default="1.5,2,3")
    p.add_argument("--p-values", default=None, help="explicit p list (default spans [q+1, 2q+0.9])")
    p.add_argument("--p-count", type=int, default=5)
    p.set_defaults(func=run_sweep, format=None)

    p = sub.add_parser("minimize", help="fixed-length steepest descent")
    _common(p, "ellipse:1.5:1")
    _energy_flags(p)
    for name, typ in (
        ("modes", int),
        ("dims", int),
        ("max-iters", int),
        ("grad-step", float),
        ("initial-step", float),
        ("shrink", float),
        ("armijo", float),
        ("max-step", float),
        ("max-backtracks", int),
        ("stop-grad-norm", float),
        ("fd-order", int),
    ):
        p.add_argument(f"--{name}", type=typ, default=None)
    p.add_argument("--energies-csv", default=None, help="path for the per-iteration energy CSV")
    p.set_defaults(func=run_minimize)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: List[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            raise ValueError(f"unknown config key {key!r}")
        defaults[dest] = str(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, RuntimeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
