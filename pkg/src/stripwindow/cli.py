"""
Command-line front end.

Every command writes one data file (CSV or JSON) to ``--out`` or standard
output.  With ``--out`` a manifest ``<out>.manifest.json`` records the
parameters, tolerances, version and a timestamp; the data file itself
carries no timestamp, so identical invocations give identical bytes.

Exit codes: 0 success, 1 usage error, 2 bracket anomaly, 3 convergence
failure, 4 fit-quality error, 5 verification criterion failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .fdoracle import FdIterationError
from .geometry import ConfigurationError, Parity, StripGeometry, normalize
from .spectrum import ConsistencyError, CurveGapError, ResolutionError
from .thresholds import BracketAnomalyError, ConvergenceError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BRACKET = 2
EXIT_CONVERGENCE = 3
EXIT_FIT = 4
EXIT_CRITERION = 5

FLOAT_FORMAT = "%.17g"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_schema(name: str) -> dict:
    """Shipped JSON schema ``<name>.schema.json``."""
    text = resources.files("stripwindow").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(payload: dict, name: str) -> None:
    jsonschema.validate(payload, load_schema(name))


def _num(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % v
    return str(v)


def render_csv(columns, records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([_num(r.get(c)) for c in columns])
    return buf.getvalue()


def render_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _clean(obj):
    """Plain Python types for JSON (numpy scalars, tuples, enums)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, Parity):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _emit(args, text: str, manifest: dict):
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.write_text(text, encoding="utf-8", newline="\n")
    manifest = dict(manifest)
    manifest["outputs"] = [out.name] + manifest.get("outputs", [])
    validate(manifest, "manifest")
    Path(f"{out}.manifest.json").write_text(render_json(manifest), encoding="utf-8", newline="\n")


def _manifest(args, truncation, tolerances, flags=None, outputs=None):
    params = {k: v for k, v in vars(args).items() if k not in ("out", "func", "figure")}
    return _clean({
        "command": args.command,
        "parameters": params,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "truncation": truncation,
        "tolerances": tolerances,
        "flags": flags or {},
        "outputs": outputs or [],
    })


def _table(args, columns, records, manifest):
    records = _clean(records)
    if args.format == "csv":
        text = render_csv(columns, records)
    else:
        payload = {"command": args.command, "columns": columns, "records": records}
        validate(payload, "table")
        text = render_json(payload)
    _emit(args, text, manifest)


def _check_modes(N, minimum=16):
    if N < minimum or N % 4:
        raise UsageError(f"--modes must be a multiple of 4 and >= {minimum}, got {N}")


def _check_d(d):
    if not d > 0:
        raise UsageError("--d must be positive")


def _figure(args, fn, *fargs, **fkw):
    if getattr(args, "figure", None):
        from . import plotting

        getattr(plotting, fn)(*fargs, path=args.figure, **fkw)


# -- commands ---------------------------------------------------------------

def cmd_thresholds(args) -> int:
    from .thresholds import threshold_table

    _check_modes(args.modes)
    _check_d(args.d)
    if args.max_n < 0:
        raise UsageError("--max-n must be >= 0")
    tol = 1e-6 if args.tol is None else args.tol
    records = threshold_table(args.max_n, args.modes, tol)
    scale = args.d / math.pi
    rows = [{
        "n": r.n,
        "parity": r.parity.value,
        "a_n": r.a_n,
        "a_n_physical": r.a_n * scale,
        "bracket_lo": r.bracket[0] * scale,
        "bracket_hi": r.bracket[1] * scale,
        "residual": r.residual,
        "N": r.N_used,
    } for r in records]
    columns = ["n", "parity", "a_n", "a_n_physical", "bracket_lo", "bracket_hi", "residual", "N"]
    _table(args, columns, rows, _manifest(args, args.modes, {"n_doubling": tol, "kernel": 1e-8}))
    _figure(args, "plot_thresholds",
            [{"n": r.n, "a_n": r.a_n, "bracket": r.bracket} for r in records], d=args.d)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    from .spectrum import full_spectrum

    _check_modes(args.modes)
    _check_d(args.d)
    if args.a < 0:
        raise UsageError("--a must be >= 0")
    a_norm, unit = normalize(StripGeometry(d=args.d, a=args.a))
    result = full_spectrum(a_norm, args.modes)
    rows = [{
        "index": p.n,
        "parity": p.parity.value,
        "a": args.a,
        "a_normalized": a_norm,
        "eps": p.eps,
        "lambda": p.eps * unit,
        "gap": p.gap * unit,
        "m": p.m * math.sqrt(unit),
        "gap_normalized": p.gap,
        "m_normalized": p.m,
    } for p in result.points]
    columns = ["index", "parity", "a", "a_normalized", "eps", "lambda", "gap", "m",
               "gap_normalized", "m_normalized"]
    _table(args, columns, rows, _manifest(args, args.modes, result.tolerances))
    _figure(args, "plot_spectrum", _clean(rows), d=args.d)
    return EXIT_OK


def cmd_mu(args) -> int:
    from .coefficients import mu_report

    if args.n < 1:
        raise UsageError("--n must be >= 1: a_0 = 0 has no threshold resonance")
    _check_modes(args.modes, minimum=64)
    rep = mu_report(args.n, args.modes)
    payload = _clean(rep.as_dict())
    manifest = _manifest(args, args.modes, {"corner_fit_spread": 0.05},
                         flags={"alpha_stderr": rep.alpha_stderr})
    if args.format == "csv":
        cols = ["n", "a_n", "mu_integral", "alpha", "mu_alpha", "rel_diff", "N"]
        _emit(args, render_csv(cols, [payload]), manifest)
    else:
        validate(payload, "mu")
        _emit(args, render_json(payload), manifest)
    return EXIT_OK


def _verify_reports(args):
    from . import coefficients as co

    eps_grid = tuple(args.eps_grid) if args.eps_grid else co.DEFAULT_EPS_GRID
    which = args.which
    if which in ("quadratic", "decay", "eigenfunction") and args.n < 1:
        raise UsageError("--n must be >= 1")
    if which == "quadratic":
        mu = co.mu_report(args.n).mu_integral
        return {"quadratic": co.verify_quadratic_law(args.n, eps_grid, args.modes, mu=mu)}
    if which == "decay":
        mu = co.mu_report(args.n).mu_integral
        return {"decay": co.verify_decay_law(args.n, eps_grid, args.modes, mu=mu)}
    if which == "eigenfunction":
        return {"eigenfunction": co.verify_eigenfunction_convergence(args.n, eps_grid)}
    if which == "popov":
        grid = tuple(args.a_grid) if args.a_grid else co.POPOV_GRID
        reports = {"popov": co.verify_popov(grid, args.modes)}
        if args.with_oracle:
            reports["popov_oracle"] = _oracle_report(max(grid), Parity.EVEN, args.modes, args.tol)
        return reports
    if which == "oracle":
        if args.a is None:
            raise UsageError("verify oracle needs --a")
        a_norm, _ = normalize(StripGeometry(d=args.d, a=args.a))
        return {"oracle": _oracle_report(a_norm, Parity.parse(args.parity), args.modes, args.tol)}
    if which == "invariants":
        from .invariants import invariant_suite

        return invariant_suite()
    raise UsageError(f"unknown verification {which!r}")


def _oracle_report(a, parity, N, tol):
    from .coefficients import FitReport
    from .fdoracle import fd_gap_extrapolated
    from .spectrum import eigenvalues_in_sector

    tol = 1e-3 if tol is None else tol
    pts = eigenvalues_in_sector(a, parity, N)
    if not pts:
        raise ConfigurationError(f"no {parity.value} eigenvalue at a={a}")
    mm = pts[0].gap
    fd = fd_gap_extrapolated(a, parity)
    rel = abs(fd.gap - mm) / mm
    rep = FitReport(
        model="finite-difference gap vs mode matching",
        coefficients=[fd.gap, mm],
        residual_norm=rel,
        sample=[(float(lv), g, mm) for lv, g in zip(fd.levels, fd.gaps)],
        extras={"a": a, "parity": parity.value, "L": fd.L, "fd_gap": fd.gap, "mm_gap": mm,
                "relative_difference": rel, "difference_ratios": list(fd.ratios)},
    )
    rep.checks["oracle_agreement"] = rel <= tol
    return rep


def cmd_verify(args) -> int:
    _check_modes(args.modes)
    _check_d(args.d)
    reports = _verify_reports(args)
    payload = _clean({
        "which": args.which,
        "passed": all(r.passed for r in reports.values()),
        "reports": {k: r.as_dict() for k, r in reports.items()},
    })
    validate(payload, "verify")
    summary = sys.stdout if args.out else sys.stderr
    for name, rep in reports.items():
        for check, ok in rep.checks.items():
            print(f"{'PASS' if ok else 'FAIL'} {name}.{check}", file=summary)
    _emit(args, render_json(payload), _manifest(args, args.modes, {"criterion": args.tol}))
    _figure(args, "plot_fit_reports", payload["reports"])
    return EXIT_OK if payload["passed"] else EXIT_CRITERION


def cmd_field(args) -> int:
    from .resonance import (AccuracyWarning, FitQualityError, bound_state_field, edge_fit,
                            eval_field, threshold_resonance)
    from .spectrum import eigenvalue_n

    _check_modes(args.modes)
    _check_d(args.d)
    if args.nx1 < 2 or args.nx2 < 2:
        raise UsageError("--nx1 and --nx2 must be >= 2")
    scale = math.pi / args.d
    if args.a is None:
        if args.n < 1:
            raise UsageError("threshold fields need --n >= 1")
        field = threshold_resonance(args.n, args.modes)
    else:
        if args.n < 0:
            raise UsageError("--n must be >= 0")
        a_norm = args.a * scale
        point = eigenvalue_n(args.n, a_norm, min(args.modes, 128))
        field = bound_state_field(a_norm, point, args.modes)
    x1r = args.x1 if args.x1 else (0.0, (field.a_ref + 6.0) / scale)
    x2r = args.x2 if args.x2 else (0.0, args.d)
    if not 0 <= x2r[0] < x2r[1] <= args.d * (1 + 1e-12):
        raise UsageError("--x2 range must lie inside [0, d]")
    x1 = np.linspace(x1r[0], x1r[1], args.nx1)
    x2 = np.linspace(x2r[0], min(x2r[1], args.d), args.nx2)
    X1, X2 = np.meshgrid(x1 * scale, np.minimum(x2 * scale, math.pi), indexing="ij")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        psi, close = eval_field(field, X1, X2, with_accuracy=True)
    flags = {
        "accuracy_warning": bool(close.any()),
        "points_near_corner": int(close.sum()),
        "a_ref_normalized": field.a_ref,
        "eps": field.eps,
    }
    if args.fit_alpha:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", AccuracyWarning)
                fit = edge_fit(field)
            flags.update({"alpha": fit.alpha, "alpha_stderr": fit.stderr, "alpha_spread": fit.spread})
        except FitQualityError as err:
            flags.update({"alpha": None, "alpha_error": str(err)})
    rows = [{"x1": X1[i, j] / scale, "x2": X2[i, j] / scale, "x1_normalized": X1[i, j],
             "x2_normalized": X2[i, j], "psi": psi[i, j]}
            for i in range(args.nx1) for j in range(args.nx2)]
    columns = ["x1", "x2", "x1_normalized", "x2_normalized", "psi"]
    _table(args, columns, rows, _manifest(args, args.modes, {"r_min": 0.02 * math.pi * 512 / args.modes},
                                          flags=flags))
    _figure(args, "plot_field", x1, x2, psi, a=field.a_ref / scale)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--d", type=float, default=math.pi, help="strip width (default: pi)")
    common.add_argument("--tol", type=float, default=None, help="command-specific tolerance")
    common.add_argument("--figure", help="also render a figure to this path (png, pdf, svg)")

    def fmt(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(prog="stripwindow", description="Bound states of a strip with a Neumann window.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("thresholds", parents=[common], help="critical half-widths a_n")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--modes", type=int, default=128)
    fmt(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues at one half-width")
    p.add_argument("--a", type=float, required=True, help="window half-width, same length unit as --d")
    p.add_argument("--modes", type=int, default=128)
    fmt(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("mu", parents=[common], help="near-threshold coefficient mu_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--modes", type=int, default=512)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_mu)

    p = sub.add_parser("verify", parents=[common], help="asymptotic-law and oracle checks")
    p.add_argument("which", choices=("quadratic", "popov", "decay", "oracle", "invariants", "eigenfunction"))
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--a", type=float, help="half-width for the oracle comparison")
    p.add_argument("--parity", choices=("even", "odd"), default="even")
    p.add_argument("--eps-grid", type=float, nargs="+")
    p.add_argument("--a-grid", type=float, nargs="+")
    p.add_argument("--with-oracle", action="store_true", help="popov: add a finite-difference check")
    p.add_argument("--modes", type=int, default=128)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("field", parents=[common], help="sample a resonance or eigenfunction on a grid")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--a", type=float, help="bound state at this half-width (default: threshold field)")
    p.add_argument("--x1", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--x2", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--nx1", type=int, default=200)
    p.add_argument("--nx2", type=int, default=50)
    p.add_argument("--fit-alpha", action="store_true")
    p.add_argument("--modes", type=int, default=256)
    p.set_defaults(func=cmd_field, format="csv")
    return parser


def main(argv=None) -> int:
    from .resonance import FitQualityError

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigurationError, CurveGapError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except BracketAnomalyError as err:
        print(f"bracket anomaly: {err}", file=sys.stderr)
        return EXIT_BRACKET
    except (ConvergenceError, ResolutionError, ConsistencyError, FdIterationError, ArithmeticError) as err:
        print(f"convergence failure: {err}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except FitQualityError as err:
        print(f"fit quality: {err}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":
    sys.exit(main())
