"""Command-line front end: ``cocap capacity | spectrum | verify``.

Exit codes: 0 success, 1 a verification failed, 2 bad input (schema or
usage), 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .bodies import Ball, BodySpecError, ConvexBody, Ellipsoid, Scaled, body_from_dict
from .calculus import axiom_harness, closed_form_capacity
from .dual import SolverError, SolverOptions, minimize_capacity, reconstruct_chord, verify_chord
from .schema import BODY_SCHEMA, RESULT_SCHEMA, SPECTRUM_SCHEMA, VERIFY_SCHEMA, validate
from .spectrum import CurveError, curve_from_body, ellipsoid_spectrum, planar_chord_actions, w_domain_curve
from .symplectic import CoisoIndex

DIGITS = 12

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_SOLVER = 0, 1, 2, 3


class InputError(Exception):
    """Bad body file or flags; maps to exit code 2."""


def _round(obj):
    """Round every float to ``DIGITS`` significant digits."""
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not np.isfinite(x) else float(f"{x:.{DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _fmt(x) -> str:
    return "" if x is None else f"{x:.{DIGITS}g}" if isinstance(x, float) else str(x)


def load_body(path: str, n: int | None) -> ConvexBody:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        spec = json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read body file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"body file is not valid JSON: {exc}") from None
    try:
        validate(spec, BODY_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(f"body does not match the schema: {exc.message}") from None
    try:
        body = body_from_dict(spec, n=n)
    except BodySpecError as exc:
        raise InputError(str(exc)) from None
    if n is not None and body.n != n:
        raise InputError(f"body lives in R^{body.dim} but --n {n} was given")
    return body


def _index(body: ConvexBody, k: int) -> CoisoIndex:
    try:
        return CoisoIndex(body.n, k)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _opts(args) -> SolverOptions:
    try:
        return SolverOptions(M=args.modes, starts=args.starts, seed=args.seed, grad_tol=args.tol, workers=args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _solve(body, idx, opts):
    est = minimize_capacity(body, idx, opts)
    chord = reconstruct_chord(est, body, idx, grad_tol=opts.grad_tol)
    return est, chord


def cmd_capacity(args) -> tuple[dict, str]:
    body = load_body(args.body, args.n)
    idx = _index(body, args.k)
    opts = _opts(args)
    exact = closed_form_capacity(body, idx)
    diagnostics: dict = {}
    chord = None
    if exact is not None and not args.check:
        result = {"capacity": exact, "method": "closed_form"}
    else:
        est, ch = _solve(body, idx, opts)
        chord = ch.summary()
        diagnostics.update(
            {
                "solver_value": est.value,
                "rayleigh_residual": est.rayleigh_residual,
                "converged": est.converged,
                "starts_agreeing": est.starts_agreeing,
                "iterations": est.iterations,
                "modes": opts.M,
                "starts": opts.starts,
                "seed": opts.seed,
            }
        )
        if exact is not None:
            diagnostics["closed_form"] = exact
            diagnostics["relative_difference"] = (est.value - exact) / exact
            result = {"capacity": exact, "method": "closed_form"}
        else:
            result = {"capacity": est.value, "method": "clarke_dual"}
    result.update({"n": idx.n, "k": idx.k, "chord": chord, "diagnostics": diagnostics})
    result = _round(result)
    validate(result, RESULT_SCHEMA)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["capacity", "method", "n", "k", "chord_action", "ode_residual", "boundary_residual", "gauge_residual"])
        res = chord["residuals"] if chord else {}
        w.writerow(
            [
                _fmt(result["capacity"]),
                result["method"],
                idx.n,
                idx.k,
                _fmt(chord["action"]) if chord else "",
                _fmt(res.get("ode")),
                _fmt(res.get("boundary")),
                _fmt(res.get("gauge")),
            ]
        )
        return result, buf.getvalue()
    return result, json.dumps(result, indent=2) + "\n"


def _ellipsoid_radii(body: ConvexBody):
    if isinstance(body, Ball):
        return [body.r] * body.n
    if isinstance(body, Ellipsoid) and body.radii is not None:
        return list(body.radii)
    if isinstance(body, Scaled):
        base = _ellipsoid_radii(body.base)
        return None if base is None else [body.factor * r for r in base]
    return None


def _bound(args) -> float:
    if args.bound is None:
        return np.inf
    if not args.bound > 0:
        raise InputError(f"--bound must be positive, got {args.bound}")
    return args.bound


def cmd_spectrum(args) -> tuple[list, str]:
    if args.w_domain is not None:
        if args.body is not None:
            raise InputError("give either a body file or --w-domain, not both")
        N, eps = args.w_domain
        try:
            spec = planar_chord_actions(w_domain_curve(N, eps).curve, _bound(args))
        except CurveError as exc:
            raise InputError(str(exc)) from None
    else:
        if args.body is None:
            raise InputError("a body file or --w-domain is required")
        body = load_body(args.body, args.n)
        idx = _index(body, args.k)
        radii = _ellipsoid_radii(body)
        if args.planar or (radii is None and idx.n == 1):
            if idx.n != 1 or idx.k != 0:
                raise InputError("planar arcs need n = 1 and k = 0")
            try:
                spec = planar_chord_actions(curve_from_body(body), _bound(args))
            except CurveError as exc:
                raise InputError(str(exc)) from None
        elif radii is not None:
            if args.bound is None or not 0 < args.bound < np.inf:
                raise InputError("ellipsoid spectra are infinite; pass a finite positive --bound")
            spec = ellipsoid_spectrum(radii, idx, args.bound)
        else:
            raise InputError("no spectrum oracle for this body (balls, axis-aligned ellipsoids and planar bodies only)")
    out = _round(spec.to_list())
    validate(out, SPECTRUM_SCHEMA)
    if args.format == "csv":
        return out, spec.to_csv(DIGITS)
    return out, json.dumps(out, indent=2) + "\n"


def cmd_verify(args, evaluate=None) -> tuple[dict, str, bool]:
    body = load_body(args.body, args.n)
    idx = _index(body, args.k)
    opts = _opts(args)
    chord_check = None
    if evaluate is None:
        est, chord = _solve(body, idx, opts)

        def evaluate(b, i, anchor=None):
            if b is body and anchor is None:
                return est.value
            return minimize_capacity(b, i, opts, anchor=anchor).value

        rep = verify_chord(chord, body, idx)
        chord_check = {"passed": rep.passed, "clauses": rep.clauses, "measurements": rep.measurements}
    report = axiom_harness(body, idx, opts, evaluate=evaluate)
    out = report.to_dict()
    ok = report.passed
    if chord_check is not None:
        out["chord"] = chord_check
        ok = ok and chord_check["passed"]
    out["passed"] = ok
    out = _round(out)
    validate(out, VERIFY_SCHEMA)
    table = report.table()
    if chord_check is not None:
        bad = [k for k, v in chord_check["clauses"].items() if not v]
        table += f"\n{'chord':<16}{'':>16}  {'leafwise chord':<22}{'':>12}  " + ("pass" if not bad else "FAIL: " + ", ".join(bad))
    return out, table, ok


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cocap", description="Coisotropic capacities of convex bodies.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, body_required=True):
        if body_required:
            sp.add_argument("body", help="BodySpec JSON file, or - for standard input")
        else:
            sp.add_argument("body", nargs="?", default=None, help="BodySpec JSON file, or - for standard input")
        sp.add_argument("--n", type=int, default=None, help="half dimension; required for balls without 'n'")
        sp.add_argument("--k", type=int, default=0, help="number of p-directions in the coisotropic subspace")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    def solver(sp):
        d = SolverOptions()
        sp.add_argument("--modes", type=int, default=d.M, help="Fourier truncation M")
        sp.add_argument("--starts", type=int, default=d.starts, help="solver restarts")
        sp.add_argument("--seed", type=int, default=d.seed)
        sp.add_argument("--tol", type=float, default=d.grad_tol, help="gradient tolerance")
        sp.add_argument("--workers", type=int, default=d.workers, help="threads for restarts")

    cap = sub.add_parser("capacity", help="capacity of a body")
    common(cap)
    solver(cap)
    cap.add_argument("--check", action="store_true", help="cross-check closed forms against the solver")

    spec = sub.add_parser("spectrum", help="chord-action spectrum")
    common(spec, body_required=False)
    spec.add_argument("--bound", type=float, default=None, help="largest action to list (required for ellipsoids)")
    spec.add_argument("--planar", action="store_true", help="arc areas of a planar body (n = 1, k = 0)")
    spec.add_argument("--w-domain", nargs=2, type=float, metavar=("N", "EPS"), default=None, help="smoothed W-domain")

    ver = sub.add_parser("verify", help="axiom and chord checks")
    common(ver)
    solver(ver)
    return p


def main(argv=None, evaluate=None) -> int:
    """Entry point; ``evaluate`` replaces the solver in ``verify`` (for test fixtures)."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "capacity":
            _, text = cmd_capacity(args)
            sys.stdout.write(text)
            return EXIT_OK
        if args.command == "spectrum":
            _, text = cmd_spectrum(args)
            sys.stdout.write(text)
            return EXIT_OK
        out, table, ok = cmd_verify(args, evaluate=evaluate)
        print(table, file=sys.stderr)
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
        if not ok:
            failed = [c["name"] for c in out["checks"] if not c["passed"]]
            if "chord" in out and not out["chord"]["passed"]:
                failed.append("chord")
            print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
            return EXIT_FAIL
        return EXIT_OK
    except (InputError, BodySpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
