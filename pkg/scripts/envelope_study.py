"""How often does adding the monotone / convex envelope restore the shape?

Random shaped grid functions are pushed through the floor and the
nearest-integer operators, the envelope polynomial is added, and the result
is certified. The floor operator is always restored; the nearest-integer
operator is not covered by the convex envelope.

    python3 scripts/envelope_study.py --ns 6-30 --trials 100
"""
import argparse
from collections import Counter

from shapebern.certify import ShapeQuery, certify_shape
from shapebern.corrections import EnvelopeKind, envelope_poly
from shapebern.operators import FLOOR_INT, apply_grid, nearest_int
from shapebern.search import random_shaped_samples, trial_rng

CASES = (
    (ShapeQuery.MONOTONE_INCREASING, EnvelopeKind.EPSILON_MONOTONE),
    (ShapeQuery.MONOTONE_DECREASING, EnvelopeKind.ETA_MONOTONE),
    (ShapeQuery.CONVEX, EnvelopeKind.EPSILON_CONVEX),
    (ShapeQuery.CONCAVE, EnvelopeKind.ETA_CONVEX),
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", default="6-30")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    lo, _, hi = args.ns.partition("-")
    ns = range(int(lo), int(hi or lo) + 1)
    for op in (FLOOR_INT, nearest_int()):
        for q, kind in CASES:
            tally = Counter()
            for n in ns:
                env = envelope_poly(kind, n)
                for t in range(args.trials):
                    v = random_shaped_samples(n, q, 60, trial_rng(args.seed + n, t))
                    cert = certify_shape(apply_grid(v, op).to_bernstein() + env, q, depth_cap=30)
                    tally[cert.status.value] += 1
            print(f"{str(op):<18} {q.value:<20} {dict(tally)}")


if __name__ == "__main__":
    main()
