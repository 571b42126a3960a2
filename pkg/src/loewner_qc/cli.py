"""Command-line front end.

Exit codes: 0 success, 1 a checked condition failed, 2 invalid input, 3 numerical failure.
Outputs go to ``--out`` if given, else to ``$LOEWNER_QC_OUTPUT_DIR/<command>.<ext>`` when
that variable is set, else to stdout.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from . import criteria, drivers, expr, extension, extremal, loewner
from .errors import (
    ConvergenceError,
    DerivativeError,
    EvaluationError,
    LoewnerQCError,
    SeriesError,
    SingularityError,
    StepFailure,
    TruncationError,
    ZeroDivisorError,
)

OUTPUT_DIR_ENV = "LOEWNER_QC_OUTPUT_DIR"

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

_NUMERIC_ERRORS = (
    ConvergenceError,
    StepFailure,
    SeriesError,
    TruncationError,
    EvaluationError,
    SingularityError,
    DerivativeError,
    ZeroDivisorError,
    ArithmeticError,
)


class InputError(Exception):
    pass


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def _emit(args, text, ext):
    path = args.out
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], f"{args.command}.{ext}")
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {path}", file=sys.stderr)


def _csv_text(writer, *data):
    buf = io.StringIO()
    writer(buf, *data)
    return buf.getvalue()


def _zeros(text):
    try:
        return [complex(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse zeros {text!r}") from exc


def _driver(args):
    k = args.k
    if not 0 < k < 1:
        raise InputError("--k must lie in (0, 1)")
    if args.family == "constant-power":
        if args.n < 1:
            raise InputError("--n must be a positive integer")
        return drivers.constant_power(k, args.theta, args.n)
    if args.family == "extremal-a3":
        return drivers.extremal_a3(k, args.sign)
    if args.zeros is None:
        raise InputError("blaschke needs --zeros")
    zs = _zeros(args.zeros)
    if not zs or any(abs(a) >= 1 for a in zs):
        raise InputError("--zeros must be points of the open unit disk")
    return drivers.blaschke(k, args.alpha, zs)


def _annulus(args):
    r1, r2, n = args.annulus
    n = int(n)
    if not 1 < r1 <= r2 or n < 2:
        raise InputError("--annulus needs 1 < R1 <= R2 and N >= 2")
    return extension.annulus_grid(r1, r2, n)


# -- commands -------------------------------------------------------------------------


def cmd_bounds(args):
    if not (0 < args.k_min <= args.k_max < 1) or args.steps < 1:
        raise InputError("need 0 < k_min <= k_max < 1 and steps >= 1")
    if args.steps > 1 and args.k_min == args.k_max:
        raise InputError("several steps need k_min < k_max")
    ks = np.linspace(args.k_min, args.k_max, args.steps)
    rows = extremal.figure1_table(ks)
    _emit(args, _csv_text(extremal.write_figure1_csv, rows), "csv")
    return EXIT_OK


def cmd_coeffs(args):
    if args.N < 2:
        raise InputError("--N must be >= 2")
    d = _driver(args)
    if args.normalize and not d.normalized:
        d = drivers.normalize_driver(d)
    if not d.normalized:
        raise SeriesError("driver is not normalized (p(0, t) != 1); rerun with --normalize")
    a = loewner.coefficient_flow(d, args.N, args.tol)
    out = {f"a_{n}": _pair(v) for n, v in zip(range(2, args.N + 1), a)}
    _emit(args, json.dumps(out, indent=2) + "\n", "json")
    return EXIT_OK


def cmd_extend(args):
    d = _driver(args)
    z = _annulus(args)
    F = extension.becker_extend(d, z, args.tol)
    _emit(args, _csv_text(extension.write_extend_csv, z, F), "csv")
    return EXIT_OK


def cmd_beltrami(args):
    d = _driver(args)
    z = _annulus(args)
    source = args.source
    if source == "closed-form":
        if d.family is drivers.Family.EXTREMAL_A3 and args.sign == 1:
            mu = extension.extremal_beltrami(d.k, z)
        elif d.family is drivers.Family.BLASCHKE:
            mu = extension.blaschke_beltrami(d, z)
        else:
            mu = extension.beltrami_of_driver(d, z)
    elif source == "driver":
        mu = extension.beltrami_of_driver(d, z)
    else:
        F = extension.extension_map(d, args.tol)
        fz, fzb = extension.wirtinger(F, z, args.h)
        mu = fzb / fz
    _emit(args, _csv_text(extension.write_beltrami_csv, z, mu), "csv")
    return EXIT_OK


def cmd_verify(args):
    if not 0 < args.k < 1:
        raise InputError("--k must lie in (0, 1)")
    f = expr.analytic_sample(args.f)
    grid = criteria.disk_grid(args.grid_n, 2 * args.grid_n)
    cond = args.condition
    if cond == "aw-becker":
        result = criteria.check_aw_becker(f, args.k, grid)
    elif cond == "pre-schwarzian":
        result = criteria.check_pre_schwarzian(f, args.k, grid)
    elif cond == "derivative":
        result = criteria.check_derivative(f, args.k, grid)
    else:
        make = {"example-1": criteria.example1_spec, "example-2": criteria.example2_spec,
                "pde-aw": criteria.aw_becker_spec}[cond]
        rep = criteria.check_pde_conditions(make(f, args.k))
        result = criteria.CheckResult(cond, rep.ok, args.k - rep.cond_ii_max, rep.cond_ii_point[0])
    _emit(args, criteria.report_json([result]) + "\n", "json")
    return EXIT_OK if result.ok else EXIT_FAILED


def cmd_lambda(args):
    if not 0 < args.k < 1:
        raise InputError("--k must lie in (0, 1)")
    coeffs = expr.laurent_coefficients(args.phi)
    norm = extremal.laurent_l1_norm(coeffs) if coeffs.size else 0.0
    normalize = not args.no_normalize
    lam = extremal.hk_lambda(args.k, coeffs, normalize=normalize, quadrature=args.quadrature)
    out = {
        "k": args.k,
        "phi_coefficients": [_pair(c) for c in coeffs],
        "l1_norm": norm,
        "normalized": normalize,
        "lambda": _pair(lam),
        "abs_lambda": abs(lam),
    }
    _emit(args, json.dumps(out, indent=2) + "\n", "json")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------


def _add_driver_args(p):
    p.add_argument("--family", required=True, choices=["constant-power", "extremal-a3", "blaschke"])
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--theta", type=float, default=0.0, help="constant-power phase")
    p.add_argument("--n", type=int, default=1, help="constant-power exponent")
    p.add_argument("--alpha", type=float, default=0.0, help="blaschke phase")
    p.add_argument("--zeros", help="blaschke zeros, comma separated, e.g. '0.3,-0.2j'")
    p.add_argument("--sign", type=int, default=1, choices=[1, -1], help="extremal-a3 branch")
    p.add_argument("--tol", type=float, default=1e-10)


def build_parser():
    parser = argparse.ArgumentParser(prog="loewner-qc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="sharp / Fekete-Szego / Krushkal bounds for |a_3|")
    p.add_argument("k_min", type=float)
    p.add_argument("k_max", type=float)
    p.add_argument("steps", type=int)
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("coeffs", help="Taylor coefficients of the generated map")
    _add_driver_args(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--normalize", action="store_true", help="renormalize the driver first")
    p.set_defaults(run=cmd_coeffs)

    p = sub.add_parser("extend", help="Becker extension on an annular grid")
    _add_driver_args(p)
    p.add_argument("--annulus", nargs=3, type=float, metavar=("R1", "R2", "N"), required=True)
    p.set_defaults(run=cmd_extend)

    p = sub.add_parser("beltrami", help="Beltrami coefficient on an annular grid")
    _add_driver_args(p)
    p.add_argument("--annulus", nargs=3, type=float, metavar=("R1", "R2", "N"), required=True)
    p.add_argument("--source", choices=["closed-form", "driver", "numeric"], default="closed-form")
    p.add_argument("--h", type=float, default=extension.FD_STEP)
    p.set_defaults(run=cmd_beltrami)

    p = sub.add_parser("verify", help="check a sufficient condition for a closed-form f")
    p.add_argument("condition", choices=["aw-becker", "pre-schwarzian", "derivative",
                                         "example-1", "example-2", "pde-aw"])
    p.add_argument("--f", required=True, help="expression in z, e.g. 'z+0.05*z^2'")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--grid-n", type=int, default=40)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("lambda", help="Hamilton-Krushkal functional of the extremal field")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--phi", required=True, help="finite Laurent sum, e.g. 'z^-3 + 0.5*z^-5'")
    p.add_argument("--no-normalize", action="store_true", help="skip L1 normalization of phi")
    p.add_argument("--quadrature", action="store_true", help="direct 2-D quadrature")
    p.set_defaults(run=cmd_lambda)

    for sp in sub.choices.values():
        sp.add_argument("--out", help="output file (default: stdout or $%s)" % OUTPUT_DIR_ENV)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, LoewnerQCError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
