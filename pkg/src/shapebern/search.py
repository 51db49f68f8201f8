"""Seeded random search for shape-preservation counterexamples, generators of
grid functions that satisfy a given sufficient condition, and a re-check of
the worked examples (the n = 6 counterexample, (x+1)^5 and sqrt(x)).

Every trial draws from its own RNG stream derived from ``(seed, trial)``, so
a run is reproducible and any single trial can be replayed in isolation.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bernstein import IntegerBernsteinPoly, derivative, evaluate, second_derivative
from .certify import (
    HYPOTHESIS_TARGETS,
    Certificate,
    HypothesisId,
    ShapeQuery,
    Status,
    certify_shape,
    check_hypothesis,
    coefficient_shape_test,
    hypothesis_margins,
    sign_change_brackets,
)
from .exact import DomainError, Enclosure, binomial, format_rational, round_rational
from .operators import (
    FLOOR_INT,
    OperatorKind,
    OperatorName,
    apply,
    apply_grid,
    power_shifted,
    sample,
    sqrt_function,
)

DEFAULT_RESOLUTION = 60
EVIDENCE_NOTE = (
    "no counterexample within the trial budget; this is evidence, not a proof"
)

# The n = 6 grid whose floor-rounded Bernstein polynomial is not increasing.
COUNTEREXAMPLE_6: Tuple[Fraction, ...] = (
    Fraction(0),
    Fraction(50, 60),
    Fraction(56, 60),
    Fraction(57, 60),
    Fraction(58, 60),
    Fraction(59, 60),
    Fraction(1),
)
COUNTEREXAMPLE_6_COEFFS = (0, 5, 14, 19, 14, 5, 1)
COUNTEREXAMPLE_6_SLOPE = (Fraction(7, 10), Fraction(-73, 2000))


class SampleMode(enum.Enum):
    BOUNDARY = "boundary"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class SearchConfig:
    n: int
    operator: OperatorKind = FLOOR_INT
    query: ShapeQuery = ShapeQuery.MONOTONE_INCREASING
    budget: int = 10_000
    resolution: int = DEFAULT_RESOLUTION
    seed: int = 0
    mode: SampleMode = SampleMode.BOUNDARY
    depth_cap: int = 40
    # grids tried before any random trial (each one counts against the budget)
    seed_samples: Tuple[Tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.budget < 1:
            raise DomainError("budget must be >= 1")
        if self.resolution < 1:
            raise DomainError("resolution must be >= 1")
        if self.operator.name is OperatorName.CLASSICAL:
            raise DomainError("search targets the integer-coefficient operators")
        if self.query.order == 2 and self.n < 2:
            raise DomainError("convexity queries need n >= 2")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "operator": self.operator.name.value,
            "tie": self.operator.tie.value,
            "query": self.query.value,
            "budget": self.budget,
            "resolution": self.resolution,
            "seed": self.seed,
            "mode": self.mode.value,
        }


@dataclass(frozen=True)
class CounterexampleReport:
    config: SearchConfig
    samples: Tuple[Fraction, ...]
    int_coeffs: Tuple[int, ...]
    certificate: Certificate
    trials_used: int

    found = True

    def verify(self) -> bool:
        """Recompute operator and certificate from the stored samples."""
        p = apply_grid(self.samples, self.config.operator)
        again = certify_shape(p, self.config.query, self.config.depth_cap)
        return p.int_coeffs == self.int_coeffs and again == self.certificate

    def to_json(self) -> dict:
        return {
            "found": True,
            "config": self.config.to_json(),
            "trials_used": self.trials_used,
            "samples": [format_rational(v) for v in self.samples],
            "int_coeffs": [str(c) for c in self.int_coeffs],
            "certificate": self.certificate.to_json(),
        }


@dataclass(frozen=True)
class NotFound:
    config: SearchConfig
    trials_used: int

    found = False

    def to_json(self) -> dict:
        return {
            "found": False,
            "config": self.config.to_json(),
            "trials_used": self.trials_used,
            "note": EVIDENCE_NOTE,
        }


# ---------------------------------------------------------------------------
# Random streams


def trial_rng(seed: int, trial: int) -> random.Random:
    """Independent stream for one trial, split from the run seed."""
    state = np.random.SeedSequence(seed, spawn_key=(trial,)).generate_state(2, np.uint64)
    return random.Random(int(state[0]) << 64 | int(state[1]))


# ---------------------------------------------------------------------------
# Sample generators


def _below(t: Fraction, q: int, exact: bool) -> Fraction:
    """A fraction with denominator q at t (rounded down) or strictly below t."""
    if exact:
        return Fraction(floor(t * q), q)
    return Fraction(ceil(t * q) - 1, q)


def _boundary_increasing(n: int, resolution: int, rng: random.Random) -> List[Fraction]:
    f0 = rng.randint(-1, 1)
    f1 = f0 + (1 if rng.random() < 0.75 else rng.randint(0, 3))
    values = [Fraction(f0)]
    lo = Fraction(f0)
    for k in range(1, n):
        c = _binomial_row(n)[k]
        m = rng.randint(ceil(lo * c), floor(f1 * c))
        q = resolution if rng.random() < 0.5 else rng.randint(1, resolution)
        v = max(lo, _below(Fraction(m, c), q, rng.random() < 0.5))
        values.append(v)
        lo = v
    values.append(Fraction(f1))
    return values


def _uniform_increasing(n: int, resolution: int, rng: random.Random) -> List[Fraction]:
    q = rng.randint(1, resolution)
    f0 = rng.randint(-1, 1)
    f1 = f0 + rng.randint(0, 3)
    inner = sorted(rng.randint(q * f0, q * f1) for _ in range(n - 1))
    return [Fraction(f0)] + [Fraction(a, q) for a in inner] + [Fraction(f1)]


def _convex(n: int, resolution: int, rng: random.Random) -> List[Fraction]:
    q = rng.randint(1, resolution)
    a0 = q * rng.randint(-1, 1)
    d = rng.randint(-2 * q, q)
    span = max(1, (4 * q) // n)
    s = [rng.randint(0, span) if rng.random() < 0.7 else 0 for _ in range(n - 1)]
    a = [a0, a0 + d]
    for sk in s:
        a.append(2 * a[-1] - a[-2] + sk)
    # lift f(1) to an integer through the last second difference
    fix = (-a[-1]) % q
    a[-1] += fix
    return [Fraction(x, q) for x in a]


def random_shaped_samples(
    n: int,
    query: ShapeQuery,
    resolution: int = DEFAULT_RESOLUTION,
    rng: Optional[random.Random] = None,
    mode: SampleMode = SampleMode.BOUNDARY,
) -> List[Fraction]:
    """Grid values f(k/n) with integer ends that have the shape ``query`` at
    grid level; every value has denominator at most ``resolution``."""
    if n < 1 or resolution < 1:
        raise DomainError("need n >= 1 and resolution >= 1")
    if query.order == 2 and n < 2:
        raise DomainError("convex grids need n >= 2")
    rng = rng or random.Random()
    if query.order == 1:
        gen = _boundary_increasing if mode is SampleMode.BOUNDARY else _uniform_increasing
        values = gen(n, resolution, rng)
        if query is ShapeQuery.MONOTONE_DECREASING:
            values = values[::-1]
    else:
        values = _convex(n, resolution, rng)
        if query is ShapeQuery.CONCAVE:
            values = [-v for v in values]
    return values


def _rational_margin(m) -> Fraction:
    return m.upper if isinstance(m, Enclosure) else m


def samples_satisfying(
    hid: Union[HypothesisId, str],
    n: int,
    rng: random.Random,
    resolution: int = DEFAULT_RESOLUTION,
    tight: float = 0.3,
) -> List[Fraction]:
    """Grid values meeting the grid hypothesis ``hid``.

    Each signed difference is its margin plus a random slack; with
    probability ``tight`` the slack is zero, so the margins are hit exactly
    and the rounding losses are as large as the hypothesis permits.
    """
    hid = HypothesisId(hid)
    q, _ = HYPOTHESIS_TARGETS[hid]
    margins = [_rational_margin(m) for m in hypothesis_margins(hid, n)]

    def slack() -> Fraction:
        if rng.random() < tight:
            return Fraction(0)
        return Fraction(rng.randint(0, 2 * resolution), resolution * rng.randint(1, n))

    f0 = Fraction(rng.randint(-2, 2))
    if q.order == 1:
        steps = [m + slack() for m in margins]
        f1 = f0 + sum(steps)
        steps[-1] += ceil(f1) - f1
        values = [f0]
        for s in steps:
            values.append(values[-1] + s)
    else:
        seconds = [m + slack() for m in margins]
        d0 = Fraction(rng.randint(-3 * resolution, resolution), resolution)
        values = [f0, f0 + d0]
        for s in seconds:
            values.append(2 * values[-1] - values[-2] + s)
        # shift the first difference so that f(1) is an integer
        delta = (ceil(values[-1]) - values[-1]) / n
        values = [v + k * delta for k, v in enumerate(values)]
    if q.sign < 0:
        values = [-v for v in values]
    return values


# ---------------------------------------------------------------------------
# Search


@lru_cache(maxsize=None)
def _binomial_row(n: int) -> Tuple[int, ...]:
    return tuple(binomial(n, k) for k in range(n + 1))


def _fast_certified(values: Sequence[Fraction], cfg: SearchConfig) -> Tuple[Tuple[int, ...], bool]:
    """Operator coefficients and whether the coefficient test already settles
    the query (integer cross-multiplication, no polynomial objects)."""
    n = cfg.n
    mode = cfg.operator.rounding
    binoms = _binomial_row(n)
    if cfg.operator.name is OperatorName.FLOOR:
        c = tuple(v.numerator * b // v.denominator for v, b in zip(values, binoms))
    else:
        c = tuple(round_rational(v * b, mode) for v, b in zip(values, binoms))
    q = cfg.query
    if q.order == 1:
        # sign * (c_{k+1}/C_{k+1} - c_k/C_k) >= 0
        ok = all(
            q.sign * (c[k + 1] * binoms[k] - c[k] * binoms[k + 1]) >= 0 for k in range(n)
        )
        return c, ok
    b = [Fraction(ck, bk) for ck, bk in zip(c, binoms)]
    ok = all(q.sign * (b[k + 2] - 2 * b[k + 1] + b[k]) >= 0 for k in range(n - 1))
    return c, ok


def _run_trial(values: Sequence[Fraction], cfg: SearchConfig, trial: int):
    c, settled = _fast_certified(values, cfg)
    if settled:
        return None
    cert = certify_shape(IntegerBernsteinPoly(c), cfg.query, cfg.depth_cap)
    if cert.refuted:
        return CounterexampleReport(cfg, tuple(values), c, cert, trial + 1)
    return None


def find_counterexample(cfg: SearchConfig) -> Union[CounterexampleReport, NotFound]:
    """First trial whose operator output is refuted for ``cfg.query``.

    Trials are numbered from 0; the explicit ``seed_samples`` come first and
    random trial t uses :func:`trial_rng` (seed, t).
    """
    trial = 0
    for values in cfg.seed_samples:
        if trial >= cfg.budget:
            return NotFound(cfg, trial)
        if len(values) != cfg.n + 1:
            raise DomainError("seed sample length does not match n")
        hit = _run_trial([Fraction(v) for v in values], cfg, trial)
        if hit:
            return hit
        trial += 1
    while trial < cfg.budget:
        rng = trial_rng(cfg.seed, trial)
        values = random_shaped_samples(cfg.n, cfg.query, cfg.resolution, rng, cfg.mode)
        hit = _run_trial(values, cfg, trial)
        if hit:
            return hit
        trial += 1
    return NotFound(cfg, trial)


# ---------------------------------------------------------------------------
# Worked examples


class ExampleMismatch(AssertionError):
    def __init__(self, example: str, detail: str):
        self.example = example
        super().__init__(f"{example}: {detail}")


@dataclass
class ExampleCheck:
    name: str
    passed: bool
    details: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"example": self.name, "passed": self.passed, **self.details}


@dataclass
class ExamplesReport:
    checks: List[ExampleCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _bracket_json(br: Sequence[Tuple[Fraction, Fraction]]) -> List[List[str]]:
    return [[format_rational(a), format_rational(b)] for a, b in br]


def _example_counterexample() -> ExampleCheck:
    p = apply_grid(COUNTEREXAMPLE_6, FLOOR_INT)
    x, expected = COUNTEREXAMPLE_6_SLOPE
    slope = evaluate(derivative(p.to_bernstein()), x)
    cert = certify_shape(p, ShapeQuery.MONOTONE_INCREASING)
    ok = p.int_coeffs == COUNTEREXAMPLE_6_COEFFS and slope == expected and cert.refuted
    return ExampleCheck(
        "counterexample-n6",
        ok,
        {
            "int_coeffs": list(p.int_coeffs),
            "derivative_at_7/10": format_rational(slope),
            "certificate": cert.to_json(),
        },
    )


def _example_power() -> ExampleCheck:
    f = power_shifted()
    details = {}
    ok = True
    for n in (5, 10):
        hyp = check_hypothesis(sample(f, n), n, HypothesisId.THM1M_A)
        cert = certify_shape(apply(f, n, FLOOR_INT), ShapeQuery.MONOTONE_INCREASING)
        details[f"n={n}"] = {"Thm1m_a": hyp.holds, "certificate": cert.to_json()}
        ok = ok and hyp.holds and cert.certified
    return ExampleCheck("power-shifted", ok, details)


def inflection_brackets(n: int, depth: int = 30) -> List[Tuple[Fraction, Fraction]]:
    """Dyadic brackets of the sign changes of B~_n(sqrt)''."""
    p = apply(sqrt_function(), n, FLOOR_INT)
    return sign_change_brackets(second_derivative(p.to_bernstein()), depth)


def _example_sqrt() -> ExampleCheck:
    f = sqrt_function()
    details = {}
    ok = True
    brackets = {}
    for n in (5, 10):
        cert = certify_shape(apply(f, n, FLOOR_INT), ShapeQuery.CONCAVE)
        br = inflection_brackets(n)
        brackets[n] = br
        details[f"n={n}"] = {"certificate": cert.to_json(), "inflection_brackets": _bracket_json(br)}
        ok = ok and cert.refuted and len(br) >= 1
    if ok:
        ok = brackets[10][0][0] > brackets[5][-1][1]
    details["inflection_moves_right"] = ok
    return ExampleCheck("sqrt", ok, details)


def verify_paper_examples(strict: bool = True) -> ExamplesReport:
    """Re-derive the three worked examples; with ``strict`` a mismatch raises
    :class:`ExampleMismatch` naming the example."""
    report = ExamplesReport([_example_counterexample(), _example_power(), _example_sqrt()])
    if strict:
        for c in report.checks:
            if not c.passed:
                raise ExampleMismatch(c.name, str(c.details))
    return report
