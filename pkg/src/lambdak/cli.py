"""Command line front end.

Exit codes: 0 success, 1 a check failed, 2 usage or schema error,
3 a mathematical precondition does not hold (excluded point, parity).
"""
from __future__ import annotations

import argparse
import cmath
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import sympy

from . import checks as suites
from .errors import PreconditionError, SchemaError
from .eta import RationalityError, circle_eta_abel_oracle, circle_eta_closed, verify_rationality
from .lambda_engine import lambda_minus_one_normal, truncated_inverse, verify_unit_identity
from .localization import load_fixed_point_data, localized_index, pole_cancellation_check
from .ring import (
    GENERIC,
    CyclotomicNumber,
    HalfLaurent,
    RationalFn,
    RootOfUnity,
    exact_value,
    exclusion_for_weights,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3

# --t values with a larger denominator are evaluated in floating point
MAX_EXACT_ORDER = 1000


class UsageError(ValueError):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


def _point(args):
    """The evaluation point from --at a/b (g = exp(2 pi i a/b)) or --generic."""
    at = getattr(args, "at", None)
    if at is None or getattr(args, "generic", False):
        return GENERIC
    try:
        return RootOfUnity.from_t(Fraction(at))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--at expects a rational a/b, got {at!r}") from None


def _complex_str(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _value_at(f, pt) -> dict:
    value = exact_value(f, pt)
    return {"exact": repr(value), "numeric": _complex_str(value.to_complex())}


def _parse_weights(text: str) -> list[tuple[int, int]]:
    out = []
    try:
        for item in text.split(","):
            if item.strip():
                v, r = item.split(":")
                out.append((int(v), int(r)))
    except ValueError:
        raise UsageError(f"weights must look like 'v:r,v:r', got {text!r}") from None
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> dict:
    if args.r_max < 1 or args.d_max < 1 or (args.n is not None and args.n < 1):
        raise UsageError("bounds must be >= 1")
    bounds = suites.Bounds(args.r_max, args.d_max, args.n, args.seed)
    plan = suites.build_suite(args.suite, bounds)
    results = suites.run_checks([c for _, c in plan])
    checks = []
    for (suite, _), res in zip(plan, results):
        entry = res.as_dict()
        entry["suite"] = suite
        checks.append(entry)
    passed = all(c["status"] == "pass" for c in checks)
    return {
        "parameters": {"suite": args.suite, "r_max": args.r_max, "d_max": args.d_max, "N": args.n, "seed": args.seed},
        "checks": checks,
        "result": {"passed": sum(c["status"] == "pass" for c in checks), "total": len(checks)},
        "exit_code": EXIT_OK if passed else EXIT_FAIL,
    }


def _load_input(source: str, params: dict):
    path = Path(source)
    if path.exists() or path.suffix != ".json":
        return load_fixed_point_data(source, params)
    # fixtures/<name>.json refers to a bundled fixture
    try:
        return load_fixed_point_data(path.stem, params)
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file or bundled fixture: {source}") from None


def cmd_localize(args) -> dict:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k] = int(v)
    if args.m is not None:
        params["m"] = args.m
    pt = _point(args)
    data = _load_input(args.input, params)
    idx = localized_index(data, args.d_max, pt if isinstance(pt, RootOfUnity) else None)
    ok, laurent = pole_cancellation_check(idx)
    result = {
        "index": str(idx.value),
        "contributions": {name: str(v) for name, v in idx.contributions},
        "pole_cancellation": ok,
        "character": str(laurent) if ok else None,
    }
    if isinstance(pt, RootOfUnity):
        result["at"] = str(pt)
        result["value"] = _value_at(idx.value, pt)
    return {
        "parameters": {"input": args.input, "params": params, "at": str(pt), "D": args.d_max},
        "checks": [{"name": "pole cancellation", "status": "pass" if ok else "fail"}],
        "result": result,
        "exit_code": EXIT_OK,
    }


def cmd_invert_lambda(args) -> dict:
    weights = _parse_weights(args.weights)
    D = args.d_max
    N = args.n if args.n is not None else max(D, 1)
    if N < 1:
        raise UsageError("N must be >= 1")
    pt = _point(args)
    inv = truncated_inverse(weights, N, pt)
    result = {
        "prefactor": str(inv.prefactor()),
        "numerator": str(inv.numerator()),
        "denominator": inv.denominator_str(),
        "character": str(inv.character()),
    }
    check = {"name": "unit identity", "params": {"D": D, "N": N}}
    try:
        ok = verify_unit_identity(weights, N, D, pt)
        check["status"] = "pass" if ok else "fail"
    except PreconditionError as exc:
        check["status"] = "error"
        check["message"] = str(exc)
        ok = None
    if isinstance(pt, RootOfUnity):
        lam = RationalFn(lambda_minus_one_normal(weights).character())
        result["character_product_at_point"] = _value_at(lam * inv.character(), pt)
    code = EXIT_OK if ok else (EXIT_PRECONDITION if ok is None else EXIT_FAIL)
    return {
        "parameters": {"weights": weights, "N": N, "D": D, "at": str(pt)},
        "checks": [check],
        "result": result,
        "exit_code": code,
    }


def cmd_eta_circle(args) -> dict:
    if args.k < 1:
        raise UsageError("k must be >= 1")
    t = None
    if args.t is not None:
        try:
            t = Fraction(args.t)
        except ValueError:
            raise UsageError(f"--t expects a number, got {args.t!r}") from None
        if t.denominator > MAX_EXACT_ORDER:
            t = float(t)
    pt = _point(args)
    if t is not None and isinstance(t, Fraction) and not isinstance(pt, RootOfUnity):
        pt = RootOfUnity.from_t(t)
    checks = []
    result = {}
    if isinstance(pt, RootOfUnity):
        value = circle_eta_closed(args.k, pt)
        result["at"] = str(pt)
        if isinstance(value, CyclotomicNumber):
            result["value"] = repr(value)
            result["numeric"] = _complex_str(value.to_complex())
        else:
            result["value"] = str(value)
    elif t is not None:
        f = circle_eta_closed(args.k)
        result["value"] = str(f)
        result["numeric"] = _complex_str(complex(f.at_q(cmath.exp(1j * cmath.pi * t))))
    else:
        result["value"] = str(circle_eta_closed(args.k))
    code = EXIT_OK
    if args.oracle:
        t_val = t if t is not None else (pt.t if isinstance(pt, RootOfUnity) else None)
        if t_val is None:
            raise UsageError("--oracle needs --t or --at")
        estimate, err = circle_eta_abel_oracle(args.k, t_val)
        result["oracle"] = _complex_str(estimate)
        result["oracle_error"] = f"{err:.3e}"
        status = "pass" if err < 1e-9 else "fail"
        checks.append({"name": "Abel oracle agrees within 1e-9", "status": status})
        code = EXIT_OK if status == "pass" else EXIT_FAIL
    return {
        "parameters": {"k": args.k, "at": str(pt), "t": None if t is None else str(t), "oracle": args.oracle},
        "checks": checks,
        "result": result,
        "exit_code": code,
    }


def parse_rational_function(text: str) -> RationalFn:
    """A rational expression in g (g**(1/2) allowed) as an exact RationalFn."""
    g = sympy.Symbol("g")
    q = sympy.Symbol("q", positive=True)
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"g": g})
    except (sympy.SympifyError, SyntaxError, TypeError):
        raise UsageError(f"cannot parse {text!r}") from None
    if expr.free_symbols - {g}:
        raise UsageError("the expression may only use the variable g")
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr.subs(g, q**2))))
    try:
        a, b = sympy.Poly(num, q).terms(), sympy.Poly(den, q).terms()
    except sympy.PolynomialError:
        raise UsageError(f"{text!r} is not rational in g^(1/2)") from None
    if not all(c.is_Rational for _, c in a + b):
        raise UsageError(f"{text!r} has non-rational coefficients")
    scale = sympy.ilcm(*[c.q for _, c in a + b])
    to_int = lambda terms: HalfLaurent({e[0]: int(c * scale) for e, c in terms})
    return RationalFn(to_int(a), to_int(b))


def cmd_reconstruct(args) -> dict:
    f = parse_rational_function(args.expr)
    excluded = [int(v) for v in args.exclude.split(",") if v.strip()] if args.exclude else []
    A = exclusion_for_weights(excluded)
    check = {"name": "rational, integral, no poles outside A"}
    result = {"input": str(f)}
    try:
        got = verify_rationality(lambda pt: exact_value(f, pt), A, args.bound)
        result["reconstructed"] = str(got)
        check["status"] = "pass" if got == f else "fail"
    except RationalityError as exc:
        check["status"] = "fail"
        check["message"] = str(exc)
    return {
        "parameters": {"expr": args.expr, "bound": args.bound, "exclude": excluded},
        "checks": [check],
        "result": result,
        "exit_code": EXIT_OK if check["status"] == "pass" else EXIT_FAIL,
    }


# ---------------------------------------------------------------------------
# argument parsing and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")

    point = argparse.ArgumentParser(add_help=False)
    grp = point.add_mutually_exclusive_group()
    grp.add_argument("--at", metavar="a/b", help="evaluate at g = exp(2 pi i a/b)")
    grp.add_argument("--generic", action="store_true", help="work with g symbolic (default)")

    parser = argparse.ArgumentParser(prog="lambdak", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run identity suites")
    p.add_argument("--suite", default="all", choices=list(suites.SUITES) + ["all"])
    p.add_argument("--r-max", type=int, default=3)
    p.add_argument("--d-max", "--D", type=int, default=4)
    p.add_argument("--n", "--N", type=int, default=None, help="truncation level (default: D)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("localize", parents=[common, point], help="localized index from fixed-point data")
    p.add_argument("input", help="JSON file or bundled fixture name")
    p.add_argument("--m", type=int, default=None, help="value of the fixture parameter m")
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--d-max", "--D", type=int, default=None, help="Chern cutoff for positive-dimensional components")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("invert-lambda", parents=[common, point], help="truncated inverse of lambda_{-1}(N*)")
    p.add_argument("--weights", required=True, help="normal weights as v:r,v:r")
    p.add_argument("--n", "--N", type=int, default=None, help="truncation level (default: D)")
    p.add_argument("--d-max", "--D", type=int, default=2)
    p.set_defaults(func=cmd_invert_lambda)

    p = sub.add_parser("eta-circle", parents=[common, point], help="reduced eta of the rotated circle")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", default=None, help="evaluate at g = exp(2 pi i t)")
    p.add_argument("--oracle", action="store_true", help="compare with the Abel-summed series")
    p.set_defaults(func=cmd_eta_circle)

    p = sub.add_parser("reconstruct", parents=[common], help="recover a rational function from samples")
    p.add_argument("--expr", required=True, help="rational expression in g")
    p.add_argument("--bound", type=int, required=True, help="degree bound")
    p.add_argument("--exclude", default="", help="weights v whose roots g^v = 1 form A")
    p.set_defaults(func=cmd_reconstruct)
    return parser


def _human(report: dict) -> str:
    lines = [f"{report['command']}: " + ", ".join(f"{k}={v}" for k, v in report["parameters"].items() if v is not None)]
    for key, value in report.get("result", {}).items():
        if isinstance(value, dict):
            for k, v in value.items():
                lines.append(f"  {key}.{k}: {v}")
        elif value is not None:
            lines.append(f"{key}: {value}")
    for c in report.get("checks", []):
        params = " ".join(f"{k}={v}" for k, v in c.get("params", {}).items())
        line = f"{c['status'].upper():5} {c['name']}" + (f" [{params}]" if params else "")
        if c.get("message"):
            line += f": {c['message']}"
        lines.append(line)
    if "timing" in report:
        lines.append(f"time: {report['timing']}s")
    return "\n".join(lines)


def run(argv=None) -> tuple[int, dict | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    start = time.perf_counter()
    report: dict = {"command": args.command}
    try:
        report.update(args.func(args))
    except (UsageError, SchemaError, FileNotFoundError, KeyError) as exc:
        report.update({"error": str(exc), "exit_code": EXIT_USAGE})
    except (PreconditionError, ZeroDivisionError) as exc:
        report.update({"error": str(exc), "exit_code": EXIT_PRECONDITION})
    if args.timing:
        report["timing"] = round(time.perf_counter() - start, 3)
    report = _jsonable(report)
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    elif "error" in report:
        print(f"error: {report['error']}", file=sys.stderr)
    else:
        print(_human(report))
    return report["exit_code"], report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
