"""Command-line interface: ``shapebern <command> ...`` (or ``python -m shapebern``).

Exit codes: 0 success / verified, 1 mismatch (or refuted when an outcome was
expected), 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

import mpmath

from .bernstein import IntegerBernsteinPoly, poly_from_json, poly_to_json
from .certify import HypothesisId, ShapeQuery, certify_shape, check_hypothesis
from .corrections import CorrectionKind, EnvelopeKind, correction_grid, envelope
from .exact import DomainError, TiePolicy, format_rational
from .operators import (
    FLOOR_INT,
    Builtin,
    EvaluationError,
    GridSamples,
    OperatorName,
    PreconditionError,
    apply,
    load_samples,
    parse_function_spec,
    parse_operator,
    sample,
    sup_deviation,
)
from .quadrature import ConvergenceError, IntegrandSpec, integrate
from .search import (
    ExampleMismatch,
    SampleMode,
    SearchConfig,
    find_counterexample,
    verify_paper_examples,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
FIGURE_POINTS = 200


class UsageError(Exception):
    pass


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")


# ---------------------------------------------------------------------------
# Commands


def cmd_approx(args) -> int:
    f = parse_function_spec(args.f)
    kind = parse_operator(args.op, args.tie)
    p = apply(f, args.n, kind)
    basis = args.basis
    if basis == "bernstein" and isinstance(p, IntegerBernsteinPoly):
        basis = "bernstein-integer"
    obj = poly_to_json(p, basis)
    obj["operator"] = str(kind)
    if isinstance(p, IntegerBernsteinPoly):
        obj["int_coeffs"] = list(p.int_coeffs)
    _emit(_json(obj), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    p = poly_from_json(Path(args.poly).read_text(encoding="utf-8"))
    cert = certify_shape(p, ShapeQuery(args.query), args.depth_cap)
    _emit(_json(cert.to_json()), args.out)
    if args.expect == "certified" and not cert.certified:
        return EXIT_MISMATCH
    if args.expect == "refuted" and not cert.refuted:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_hypothesis(args) -> int:
    g = load_samples(args.samples)
    res = check_hypothesis(g.values, g.n, args.id)
    _emit(_json(res.to_json()), args.out)
    return EXIT_OK if res.holds else EXIT_MISMATCH


def cmd_corrections(args) -> int:
    kind = CorrectionKind(args.kind)
    table = correction_grid(kind, args.n)
    obj = table.to_json()
    status = EXIT_OK
    if args.check_quadrature:
        if kind is CorrectionKind.PHI_ENTROPY:
            raise UsageError("the entropy function has no integral representation to check")
        checks = {}
        for k, v in table.entries.items():
            try:
                r = integrate(IntegrandSpec(kind, args.n, Fraction(k, args.n)), tol=args.tol)
                value = r.value
            except ConvergenceError as exc:
                value = exc.best.value
                status = EXIT_MISMATCH
            err = abs(value - mpmath.mpf(v.numerator) / v.denominator)
            if err > args.tol:
                status = EXIT_MISMATCH
            checks[str(k)] = {"quadrature": mpmath.nstr(value, 20), "abs_error": mpmath.nstr(err, 3)}
        obj["quadrature_check"] = {"tol": args.tol, "entries": checks, "passed": status == EXIT_OK}
    _emit(_json(obj), args.out)
    return status


def cmd_envelope(args) -> int:
    if args.grid < 1:
        raise UsageError("--grid must be >= 1")
    kind = EnvelopeKind(args.kind)
    rows = []
    for j in range(args.grid + 1):
        x = Fraction(j, args.grid)
        rows.append((format_rational(x), format_rational(envelope(kind, args.n, x))))
    _emit(_csv(("x", "value"), rows), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = SearchConfig(
        n=args.n,
        operator=parse_operator(args.op, args.tie),
        query=ShapeQuery(args.query),
        budget=args.budget,
        resolution=args.resolution,
        seed=args.seed,
        mode=SampleMode(args.mode),
    )
    res = find_counterexample(cfg)
    _emit(_json(res.to_json()), args.out)
    return EXIT_OK if res.found else EXIT_MISMATCH


def figure_rows(f: Builtin, ns=(5, 10), points: int = FIGURE_POINTS):
    polys = [apply(f, n, FLOOR_INT) for n in ns]
    for j in range(points + 1):
        x = Fraction(j, points)
        fx = mpmath.nstr(f.approx(mpmath.mpf(j) / points), 17)
        yield [format_rational(x), fx] + [format_rational(p(x)) for p in polys]


def write_figures(directory: Path) -> List[Path]:
    from .operators import power_shifted, sqrt_function

    directory.mkdir(parents=True, exist_ok=True)
    out = []
    header = ("x", "f", "floor_B5", "floor_B10")
    for name, f in (("figure1_power_shifted.csv", power_shifted()), ("figure2_sqrt.csv", sqrt_function())):
        path = directory / name
        path.write_text(_csv(header, figure_rows(f)), encoding="utf-8")
        out.append(path)
    return out


def cmd_verify_paper(args) -> int:
    report = verify_paper_examples(strict=False)
    obj = report.to_json()
    if args.figures_dir:
        obj["figures"] = [str(p) for p in write_figures(Path(args.figures_dir))]
    _emit(_json(obj), args.out)
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        print(f"mismatch in: {', '.join(failed)}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_convergence(args) -> int:
    f = parse_function_spec(args.f)
    if not isinstance(f, Builtin):
        raise UsageError("convergence needs a builtin function, not grid samples")
    ops = [o.strip() for o in args.ops.split(",") if o.strip()]
    rows = []
    for n in _int_list(args.ns):
        for op in ops:
            kind = parse_operator(op, args.tie)
            p = apply(f, n, kind)
            dev = sup_deviation(f, p, grid=args.grid)
            rows.append((n, str(kind), mpmath.nstr(dev, 17)))
    _emit(_csv(("n", "operator", "sup_deviation"), rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shapebern", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    ops = [o.value for o in OperatorName]
    ties = [t.value for t in TiePolicy]
    queries = [q.value for q in ShapeQuery]

    def common(p):
        p.add_argument("--out", help="write to this file instead of stdout")
        return p

    p = common(sub.add_parser("approx", help="apply an operator, print polynomial JSON"))
    p.add_argument("--f", required=True, help="sqrt | (x+1)^5 | entropy | linear:a,b | poly:c0,c1,... | @samples.json")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--op", choices=ops, default="floor")
    p.add_argument("--tie", choices=ties)
    p.add_argument("--basis", choices=["bernstein", "power"], default="bernstein")
    p.set_defaults(func=cmd_approx)

    p = common(sub.add_parser("certify", help="certify or refute a shape query"))
    p.add_argument("--poly", required=True, help="polynomial JSON file (as written by approx)")
    p.add_argument("--query", choices=queries, required=True)
    p.add_argument("--depth-cap", type=int, default=40)
    p.add_argument("--expect", choices=["certified", "refuted"])
    p.set_defaults(func=cmd_certify)

    p = common(sub.add_parser("hypothesis", help="check a grid hypothesis on sample values"))
    p.add_argument("--samples", required=True)
    p.add_argument("--id", choices=[h.value for h in HypothesisId], required=True)
    p.set_defaults(func=cmd_hypothesis)

    p = common(sub.add_parser("corrections", help="exact correction-function grid table"))
    p.add_argument("--kind", choices=[k.value for k in CorrectionKind], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--check-quadrature", action="store_true")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_corrections)

    p = common(sub.add_parser("envelope", help="envelope values on a uniform grid (CSV)"))
    p.add_argument("--kind", choices=[k.value for k in EnvelopeKind], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", type=int, default=100)
    p.set_defaults(func=cmd_envelope)

    p = common(sub.add_parser("search", help="seeded counterexample search"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--op", choices=["floor", "nearest"], default="floor")
    p.add_argument("--tie", choices=ties)
    p.add_argument("--query", choices=queries, default="monotone-increasing")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=60)
    p.add_argument("--mode", choices=[m.value for m in SampleMode], default="boundary")
    p.set_defaults(func=cmd_search)

    p = common(sub.add_parser("verify-paper", help="re-check the worked examples"))
    p.add_argument("--figures-dir", help="also write the figure data CSVs here")
    p.set_defaults(func=cmd_verify_paper)

    p = common(sub.add_parser("convergence", help="sup-grid deviation table (CSV)"))
    p.add_argument("--f", required=True)
    p.add_argument("--ops", default="classical,floor,nearest")
    p.add_argument("--tie", choices=ties)
    p.add_argument("--ns", default="5,10,20,50,100")
    p.add_argument("--grid", type=int, default=100)
    p.set_defaults(func=cmd_convergence)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, PreconditionError, EvaluationError, ValueError,
            OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"shapebern {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExampleMismatch as exc:  # pragma: no cover - strict mode is not used here
        print(str(exc), file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
