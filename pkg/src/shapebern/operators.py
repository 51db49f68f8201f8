"""The classical Bernstein operator and its floor / nearest-integer variants."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import mpmath

from .bernstein import BernsteinPoly, IntegerBernsteinPoly, evaluate
from .exact import (
    FLOOR,
    DomainError,
    Enclosure,
    RoundingMode,
    TiePolicy,
    Undecidable,
    binomial,
    exact_sqrt,
    format_rational,
    nearest,
    parse_rational,
    round_enclosure,
    round_rational,
    sqrt_enclosure,
)

Sample = Union[Fraction, Enclosure]
INITIAL_BITS = 64


class EvaluationError(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


class RoundingUndecidable(EvaluationError):
    def __init__(self, k: int, cause: Undecidable):
        self.k = k
        self.cause = cause
        super().__init__(f"rounding of sample k={k} is undecidable: {cause}")


# ---------------------------------------------------------------------------
# Function specifications


@dataclass(frozen=True)
class GridSamples:
    values: Tuple[Fraction, ...]

    def __init__(self, values: Sequence[Union[int, Fraction, str]]):
        vals = tuple(parse_rational(v) if isinstance(v, str) else Fraction(v) for v in values)
        if len(vals) < 2:
            raise DomainError("grid samples need n >= 1 (at least two values)")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values) - 1

    def reflected(self) -> "GridSamples":
        return GridSamples(self.values[::-1])

    def to_json(self) -> dict:
        return {"n": self.n, "values": [format_rational(v) for v in self.values]}


@dataclass(frozen=True)
class Builtin:
    """A named function with exact-or-enclosure evaluation at rationals.

    ``enclose(x, bits)`` returns a Fraction when f(x) is rational and known
    exactly, otherwise an :class:`Enclosure` of width about 2**-bits.
    ``approx(x)`` is a high-precision mpmath value used only for reporting.
    """

    name: str
    enclose: Callable[[Fraction, int], Sample]
    approx: Callable[[object], object]

    def __repr__(self) -> str:
        return f"Builtin({self.name!r})"


FunctionSpec = Union[GridSamples, Builtin]


def _sqrt_enclose(x: Fraction, bits: int) -> Sample:
    r = exact_sqrt(x)
    if r is not None:
        return r
    return sqrt_enclosure(x, bits)


def sqrt_function() -> Builtin:
    return Builtin("sqrt", _sqrt_enclose, mpmath.sqrt)


def power_shifted() -> Builtin:
    return Builtin("(x+1)^5", lambda x, bits: (x + 1) ** 5, lambda x: (x + 1) ** 5)


def linear(a: Union[int, Fraction], b: Union[int, Fraction]) -> Builtin:
    a, b = Fraction(a), Fraction(b)
    return Builtin(
        f"linear:{format_rational(a)},{format_rational(b)}",
        lambda x, bits: a * x + b,
        lambda x: mpmath.mpf(a.numerator) / a.denominator * x
        + mpmath.mpf(b.numerator) / b.denominator,
    )


def polynomial(coeffs: Sequence[Union[int, Fraction]]) -> Builtin:
    cs = [Fraction(c) for c in coeffs]

    def exact(x: Fraction, bits: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    def approx(x):
        acc = mpmath.mpf(0)
        for c in reversed(cs):
            acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
        return acc

    return Builtin("poly:" + ",".join(format_rational(c) for c in cs), exact, approx)


def entropy_function() -> Builtin:
    from .corrections import entropy_phi

    def enclose(x: Fraction, bits: int) -> Sample:
        e = entropy_phi(x, bits)
        return e.lower if e.is_exact else e

    def approx(x):
        x = mpmath.mpf(x)
        if x == 0 or x == 1:
            return mpmath.mpf(0)
        return 6 * (x * mpmath.log(x) + (1 - x) * mpmath.log(1 - x))

    return Builtin("entropy", enclose, approx)


def parse_function_spec(text: str) -> FunctionSpec:
    """Builtin selector or ``@file`` pointing at a sample-file JSON."""
    s = text.strip()
    if s.startswith("@"):
        return load_samples(Path(s[1:]))
    key = s.replace(" ", "")
    if key == "sqrt":
        return sqrt_function()
    if key in ("(x+1)^5", "(x+1)**5"):
        return power_shifted()
    if key == "entropy":
        return entropy_function()
    if key.startswith("linear:"):
        parts = key[len("linear:"):].split(",")
        if len(parts) != 2:
            raise ValueError("linear spec needs exactly two coefficients: linear:a,b")
        return linear(parse_rational(parts[0]), parse_rational(parts[1]))
    if key.startswith("poly:"):
        parts = [p for p in key[len("poly:"):].split(",") if p]
        if not parts:
            raise ValueError("poly spec needs at least one coefficient")
        return polynomial([parse_rational(p) for p in parts])
    raise ValueError(f"unknown function spec {text!r}")


def load_samples(path: Union[str, Path]) -> GridSamples:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    g = GridSamples(obj["values"])
    if "n" in obj and obj["n"] != g.n:
        raise DomainError(f"sample file says n={obj['n']} but has {len(g.values)} values")
    return g


# ---------------------------------------------------------------------------
# Operators


class OperatorName(enum.Enum):
    CLASSICAL = "classical"
    FLOOR = "floor"
    NEAREST = "nearest"


@dataclass(frozen=True)
class OperatorKind:
    name: OperatorName
    tie: TiePolicy = TiePolicy.HALF_UP

    @property
    def rounding(self) -> Optional[RoundingMode]:
        if self.name is OperatorName.FLOOR:
            return FLOOR
        if self.name is OperatorName.NEAREST:
            return nearest(self.tie)
        return None

    def __str__(self) -> str:
        if self.name is OperatorName.NEAREST:
            return f"nearest({self.tie.value})"
        return self.name.value


CLASSICAL = OperatorKind(OperatorName.CLASSICAL)
FLOOR_INT = OperatorKind(OperatorName.FLOOR)


def nearest_int(tie: TiePolicy = TiePolicy.HALF_UP) -> OperatorKind:
    return OperatorKind(OperatorName.NEAREST, tie)


INTEGER_OPERATORS = (FLOOR_INT,) + tuple(nearest_int(t) for t in TiePolicy)


def parse_operator(op: str, tie: Optional[str] = None) -> OperatorKind:
    name = OperatorName(op)
    if name is OperatorName.NEAREST:
        return nearest_int(TiePolicy(tie) if tie else TiePolicy.HALF_UP)
    return OperatorKind(name)


def sample(f: FunctionSpec, n: int, bits: int = INITIAL_BITS) -> List[Sample]:
    """Values f(k/n), k = 0..n (exact where possible)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if isinstance(f, GridSamples):
        if f.n != n:
            raise DomainError(f"grid samples have n={f.n}, requested n={n}")
        return list(f.values)
    out = []
    for k in range(n + 1):
        try:
            out.append(f.enclose(Fraction(k, n), bits))
        except Exception as exc:  # evaluator failure
            raise EvaluationError(f"{f.name} failed at x={k}/{n}: {exc}") from exc
    return out


def _exact_endpoint(v: Sample, where: str) -> Fraction:
    if isinstance(v, Enclosure):
        if not v.is_exact:
            raise PreconditionError(f"f({where}) is not known to be an integer")
        v = v.lower
    if v.denominator != 1:
        raise PreconditionError(f"f({where}) = {v} is not an integer")
    return v


def apply(
    f: FunctionSpec, n: int, kind: OperatorKind = FLOOR_INT
) -> Union[BernsteinPoly, IntegerBernsteinPoly]:
    values = sample(f, n)
    if kind.name is OperatorName.CLASSICAL:
        if any(isinstance(v, Enclosure) and not v.is_exact for v in values):
            raise EvaluationError("classical operator needs exact rational samples")
        return BernsteinPoly([v.lower if isinstance(v, Enclosure) else v for v in values])
    _exact_endpoint(values[0], "0")
    _exact_endpoint(values[-1], "1")
    mode = kind.rounding
    coeffs = []
    for k, v in enumerate(values):
        c = binomial(n, k)
        if isinstance(v, Enclosure):
            x = Fraction(k, n)
            refine = _scaled_refiner(f, x, c)
            try:
                coeffs.append(round_enclosure(v.scale(c), mode, refine))
            except Undecidable as exc:
                raise RoundingUndecidable(k, exc) from exc
        else:
            coeffs.append(round_rational(v * c, mode))
    return IntegerBernsteinPoly(coeffs)


def _scaled_refiner(f: Builtin, x: Fraction, c: int):
    def refine(bits: int) -> Enclosure:
        v = f.enclose(x, bits)
        if not isinstance(v, Enclosure):
            return Enclosure.exact(v * c, bits)
        return v.scale(c)

    return refine


def apply_grid(values: Sequence[Fraction], kind: OperatorKind) -> Union[BernsteinPoly, IntegerBernsteinPoly]:
    """Shorthand for :func:`apply` on exact grid samples."""
    g = GridSamples(values)
    return apply(g, g.n, kind)


def control_values(p: IntegerBernsteinPoly) -> List[Fraction]:
    n = p.degree
    return [Fraction(c, binomial(n, k)) for k, c in enumerate(p.int_coeffs)]


def as_bernstein(p: Union[BernsteinPoly, IntegerBernsteinPoly]) -> BernsteinPoly:
    return p.to_bernstein() if isinstance(p, IntegerBernsteinPoly) else p


def sup_deviation(f: Builtin, p: Union[BernsteinPoly, IntegerBernsteinPoly], grid: int = 100, dps: int = 40):
    """max over x = j/grid of |p(x) - f(x)|, as an mpmath number."""
    p = as_bernstein(p)
    with mpmath.workdps(dps):
        best = mpmath.mpf(0)
        for j in range(grid + 1):
            x = Fraction(j, grid)
            px = evaluate(p, x)
            fx = f.approx(mpmath.mpf(x.numerator) / x.denominator)
            d = abs(mpmath.mpf(px.numerator) / px.denominator - fx)
            best = max(best, d)
        return +best
