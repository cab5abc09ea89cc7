"""Command-line front end: ``padiflow <command> ...``.

Reports are JSON on standard output (``--human`` gives a plain table).  Exit
status is 0 on success, 1 when a hypothesis or precondition fails and 2 when
the input cannot be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, List, Optional

import jsonschema

from .charp import scan_primes
from .errors import (
    BadReduction,
    HypothesisViolated,
    InsufficientBudget,
    InvalidArgument,
    PadiflowError,
    PreconditionViolated,
)
from .exactnum import Q, format_rational, is_prime
from .foliation import (
    VectorField,
    classify_singularity,
    defect_order,
    invariance_defect,
    separatrix_series,
)
from .ode import OdeProblem, solve_direct, solve_newton, check_self_bounded
from .schemas import BY_KIND
from .selftest import run_selftest
from .series import TruncSeries
from .size import aanalyticity_budget, lambda_exponent, proper_transform

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE = 0, 1, 2


class ParseError(Exception):
    pass


def load_problem(path: str, kind: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ParseError(f"{path} is not valid JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("kind") != kind:
        found = doc.get("kind") if isinstance(doc, dict) else type(doc).__name__
        raise ParseError(f"expected a problem of kind {kind!r}, found {found!r}")
    validator = jsonschema.Draft202012Validator(BY_KIND[kind])
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(x) for x in e.absolute_path) or "<root>"
        raise ParseError(f"schema violation at {where}: {e.message}")
    return doc


def _parsing(build: Callable):
    """Run a constructor, turning argument errors into parse errors."""
    try:
        return build()
    except (InvalidArgument, ValueError, KeyError, TypeError) as e:
        raise ParseError(str(e)) from None


def _series_doc(s: TruncSeries) -> dict:
    return s.to_json()


def _pick_order(args_order: Optional[int], doc: dict, required: bool = True) -> Optional[int]:
    order = args_order if args_order is not None else doc.get("order")
    if order is None and required:
        raise ParseError("no truncation order: pass --order or set \"order\" in the file")
    return order


# -- commands -------------------------------------------------------------------


def cmd_solve(args) -> dict:
    doc = load_problem(args.input, "ode")
    order = _pick_order(args.order, doc)
    prob = _parsing(lambda: OdeProblem.from_json(doc, order))
    res = solve_newton(prob, order)
    direct = solve_direct(prob, order)
    return {
        "command": "solve",
        "order": res.y.order,
        "prime": prob.p,
        "s": prob.s,
        "t": prob.t,
        "direct": _series_doc(direct),
        "newton": _series_doc(res.y),
        "agree": direct == res.y,
        "newtonSteps": len(res.corrections) - 1,
        "ledger": res.ledger.to_json(),
        "selfBounded": check_self_bounded(res.y, res.ledger.certified_r, prob.p),
        "decrementWithinBound": res.ledger.decrement_within_bound(),
    }


def cmd_separatrix(args) -> dict:
    doc = load_problem(args.input, "field")
    order = _pick_order(args.order, doc)
    V = _parsing(lambda: VectorField.from_json(doc))
    cls = classify_singularity(V)
    out = {"command": "separatrix", "order": order, "classification": cls.to_json()}
    for which in (1, 2):
        phi = separatrix_series(V, which, order)
        defect = invariance_defect(V, phi, which, order)
        out[f"phi{which}"] = _series_doc(phi)
        out[f"defectOrder{which}"] = defect_order(defect)
    out["zeroThrough"] = order
    return out


def cmd_size(args) -> dict:
    doc = load_problem(args.input, "series")
    prime = args.prime if args.prime is not None else doc.get("prime")
    if prime is None:
        raise ParseError("no prime: pass --prime or set \"prime\" in the file")
    order = _pick_order(args.order, doc, required=False)
    phi = _parsing(lambda: TruncSeries.from_json(doc["series"], order))
    if order is not None and phi.order > order:
        phi = phi.truncate(order)
    if prime < 3 or not is_prime(prime):
        raise ParseError(f"{prime} is not an odd prime")
    est = lambda_exponent(phi, prime)
    out = {"command": "size", **est.to_json()}
    if phi.order >= 2 and not phi[0] and not phi[1]:
        try:
            out["properTransform"] = _series_doc(proper_transform(phi, prime))
        except InvalidArgument:
            out["properTransform"] = None
    return out


def cmd_pclosed(args) -> dict:
    doc = load_problem(args.input, "field")
    rng = args.range if args.range is not None else doc.get("primeRange")
    if rng is None:
        single = doc.get("prime")
        if single is None:
            raise ParseError("no primes: pass --range LO HI or set \"primeRange\" in the file")
        rng = [single, single]
    lo, hi = int(rng[0]), int(rng[1])
    if lo > hi:
        raise ParseError(f"empty prime range [{lo}, {hi}]")
    V = _parsing(lambda: VectorField.from_json(doc))
    primes = [q for q in range(max(lo, 3), hi + 1) if is_prime(q)]
    results = scan_primes(V, primes)
    return {
        "command": "pclosed",
        "range": [lo, hi],
        "results": [{"p": q, "status": status} for q, status in results],
    }


def cmd_budget(args) -> dict:
    C = _parsing(lambda: Q(args.C))
    width = _parsing(lambda: Q(args.width))
    if args.pmax < 3:
        raise ParseError("--pmax must be at least 3")
    if args.s < 1 or args.t < 1:
        raise ParseError("--s and --t must be positive")
    res = aanalyticity_budget(args.s, args.t, C, args.pmax, args.exclude or (), width)
    return {"command": "budget", "s": args.s, "t": args.t, "C": format_rational(C), **res.to_json()}


def cmd_selftest(args) -> dict:
    results = run_selftest(args.seed, args.scale)
    return {
        "command": "selftest",
        "seed": args.seed,
        "checks": [r.to_json() for r in results],
        "passed": all(r.passed for r in results),
    }


# -- human-readable rendering -----------------------------------------------------


def _approx(interval) -> str:
    lo, hi = (float(Q(x)) for x in interval)
    return f"[{lo:.12g}, {hi:.12g}]"


def _series_line(doc: dict) -> str:
    terms = doc["terms"]
    if not terms:
        return "0"
    return ", ".join(f"T^{m}: {c}" for m, c in terms)


def render_human(report: dict) -> str:
    cmd = report.get("command")
    lines: List[str] = []
    if cmd == "solve":
        lines.append(f"order {report['order']}  p={report['prime']}  alpha={report['s']}/{report['t']}")
        lines.append(f"newton == direct: {report['agree']}  ({report['newtonSteps']} Newton steps)")
        lines.append(f"y = {_series_line(report['newton'])}")
        led = report["ledger"]
        lines.append(f"k1 = {led['k1']}")
        lines.append(f"{'k':>3}  {'regime':<7}  log r_k = u log p + v log 2")
        for e in led["entries"]:
            lr = e["logr"]
            lines.append(f"{e['k']:>3}  {e['regime']:<7}  u={lr['logp']}  v={lr['log2']}")
        cr = led["certifiedR"]
        lines.append(f"certified R: u={cr['logp']}  v={cr['log2']}")
        lines.append(f"log of closed-form R in {_approx(led['closedFormR'])}")
        lines.append(f"self-bounded at certified R: {report['selfBounded']}")
        lines.append(f"decrement within bound: {report['decrementWithinBound']}")
    elif cmd == "separatrix":
        c = report["classification"]
        lines.append(f"kind {c['kind']}  alpha={c['alpha']}  (s, t)=({c['s']}, {c['t']})")
        for w in (1, 2):
            d = report[f"defectOrder{w}"]
            shown = f"> {report['zeroThrough']}" if d is None else str(d)
            lines.append(f"phi{w} = {_series_line(report[f'phi{w}'])}")
            lines.append(f"defect order {w}: {shown}")
    elif cmd == "size":
        for key in ("p", "order", "lambdaP", "lowerBoundLogP", "exact", "rhoLowerLogP"):
            lines.append(f"{key:<15} {report[key]}")
        if report.get("properTransform") is not None:
            lines.append(f"{'properTransform':<15} {_series_line(report['properTransform'])}")
    elif cmd == "pclosed":
        lines.append(f"{'p':>6}  status")
        for r in report["results"]:
            lines.append(f"{r['p']:>6}  {r['status']}")
    elif cmd == "budget":
        lines.append(f"s={report['s']}  t={report['t']}  C={report['C']}  pMax={report['pMax']}")
        lines.append(f"partial in {_approx(report['partial'])}")
        lines.append(f"tail    in {_approx(report['tail'])}")
    elif cmd == "selftest":
        for c in report["checks"]:
            lines.append(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}  ({c['count']})")
    else:
        for k, v in report.items():
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padiflow", description="p-adic separatrix and radius toolkit")
    parser.add_argument("--human", action="store_true", help="tabular output instead of JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--human", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(func=fn)
        return p

    p = add("solve", cmd_solve, "solve an ODE problem by both solvers")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int)

    p = add("separatrix", cmd_separatrix, "separatrices of a field in normal form")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int)

    p = add("size", cmd_size, "size exponents of a graph")
    p.add_argument("--input", required=True)
    p.add_argument("--prime", type=int)
    p.add_argument("--order", type=int)

    p = add("pclosed", cmd_pclosed, "p-closure scan over a prime range")
    p.add_argument("--input", required=True)
    p.add_argument("--range", type=int, nargs=2, metavar=("LO", "HI"))

    p = add("budget", cmd_budget, "summability budget over primes")
    p.add_argument("--pmax", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--C", default="14")
    p.add_argument("--exclude", type=int, nargs="*")
    p.add_argument("--width", default="1/1000000")

    p = add("selftest", cmd_selftest, "run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=int, default=1)
    return parser


_ERROR_NAMES = {
    InvalidArgument: "invalid-argument",
    PreconditionViolated: "precondition-violated",
    InsufficientBudget: "insufficient-budget",
    BadReduction: "bad-reduction",
}


def _error_report(kind: str, exc: Exception) -> dict:
    out = {"status": "error", "error": kind, "message": str(exc)}
    if isinstance(exc, HypothesisViolated):
        out["hypothesis"] = exc.what
        out["index"] = exc.index
    return out


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    human = getattr(args, "human", False)
    try:
        report = args.func(args)
        status = EXIT_OK
        if args.command == "selftest" and not report["passed"]:
            status = EXIT_VIOLATION
    except ParseError as e:
        report, status = _error_report("parse", e), EXIT_PARSE
    except HypothesisViolated as e:
        report, status = _error_report("hypothesis-violated", e), EXIT_VIOLATION
    except PadiflowError as e:
        report, status = _error_report(_ERROR_NAMES.get(type(e), "error"), e), EXIT_VIOLATION
    if human:
        text = render_human(report) if status == EXIT_OK or args.command == "selftest" else \
            f"error ({report['error']}): {report['message']}"
    else:
        text = json.dumps(report, indent=2, ensure_ascii=False)
    print(text, file=out)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
