"""Seeded counterexample search over a range of degrees.

    python3 scripts/counterexample_search.py --ns 1-8 --budget 100000 --query monotone-increasing

A NotFound row is evidence only: it says the search did not find a grid
function, not that none exists.
"""
import argparse
import time

from shapebern.certify import ShapeQuery
from shapebern.operators import parse_operator
from shapebern.search import SampleMode, SearchConfig, find_counterexample


def degree_range(text: str):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", default="1-8")
    ap.add_argument("--op", default="floor", choices=["floor", "nearest"])
    ap.add_argument("--tie", default=None)
    ap.add_argument("--query", default="monotone-increasing", choices=[q.value for q in ShapeQuery])
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--resolution", type=int, default=60)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--mode", default="boundary", choices=[m.value for m in SampleMode])
    args = ap.parse_args()

    op = parse_operator(args.op, args.tie)
    print(f"{'n':>3}  {'result':<9} {'trials':>7} {'seconds':>8}  samples")
    for n in degree_range(args.ns):
        if ShapeQuery(args.query).order == 2 and n < 2:
            continue
        cfg = SearchConfig(n, op, ShapeQuery(args.query), args.budget, args.resolution,
                           args.seed, SampleMode(args.mode))
        t0 = time.perf_counter()
        res = find_counterexample(cfg)
        dt = time.perf_counter() - t0
        samples = " ".join(res.to_json()["samples"]) if res.found else "-"
        print(f"{n:>3}  {'found' if res.found else 'NotFound':<9} {res.trials_used:>7} {dt:>8.1f}  {samples}")


if __name__ == "__main__":
    main()
