"""Sup-grid deviation of the classical and integer operators for a builtin
function over increasing degrees (CSV on stdout).

    python3 scripts/convergence_table.py --f sqrt --ns 5,10,20,50,100,200

For irrational samples the classical column uses 128-bit lower bounds of
f(k/n), which is far below the plotted precision.
"""
import argparse
import csv
import sys
from fractions import Fraction

import mpmath

from shapebern.bernstein import BernsteinPoly
from shapebern.operators import apply, parse_function_spec, parse_operator, sample, sup_deviation


def classical(f, n):
    vals = sample(f, n, bits=128)
    return BernsteinPoly([v if isinstance(v, Fraction) else v.lower for v in vals])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f", default="sqrt")
    ap.add_argument("--ns", default="5,10,20,50,100,200")
    ap.add_argument("--grid", type=int, default=200)
    args = ap.parse_args()
    f = parse_function_spec(args.f)
    ops = [parse_operator("floor"), parse_operator("nearest")]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "classical"] + [str(op) for op in ops])
    for n in (int(t) for t in args.ns.split(",")):
        polys = [classical(f, n)] + [apply(f, n, op) for op in ops]
        w.writerow([n] + [mpmath.nstr(sup_deviation(f, p, args.grid), 6) for p in polys])


if __name__ == "__main__":
    main()
