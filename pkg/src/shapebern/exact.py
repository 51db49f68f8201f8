"""Exact numeric core: rationals, binomials, the two rounding functions and
rational enclosures for values that are not themselves rational.

Rationals are plain :class:`fractions.Fraction` objects.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

Rational = Fraction
RationalLike = Union[int, Fraction, str]

DEFAULT_PRECISION_CAP = 4096
PRECISION_ENV_VAR = "SHAPEBERN_PRECISION_BITS"


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class Undecidable(ArithmeticError):
    """An enclosure still straddles a rounding boundary at the precision cap."""

    def __init__(self, enclosure: "Enclosure", message: str = ""):
        self.enclosure = enclosure
        super().__init__(
            message
            or f"cannot round [{enclosure.lower}, {enclosure.upper}] "
            f"at {enclosure.precision_bits} bits"
        )


def precision_cap() -> int:
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw:
        cap = int(raw)
        if cap < 1:
            raise DomainError(f"{PRECISION_ENV_VAR} must be positive, got {raw!r}")
        return cap
    return DEFAULT_PRECISION_CAP


# ---------------------------------------------------------------------------
# Rational text format


def parse_rational(text: RationalLike) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or a decimal such as ``"0.95"`` exactly.

    A leading Unicode minus (U+2212) is accepted as well as ``-``.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse {type(text).__name__} as a rational")
    s = text.strip().replace("−", "-")
    if not s:
        raise ValueError("empty rational")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational {text!r}") from exc


def format_rational(q: Union[int, Fraction]) -> str:
    return str(Fraction(q))


# ---------------------------------------------------------------------------
# Binomials


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"binomial({n}, {k}) requires 0 <= k <= n")
    return math.comb(n, k)


# ---------------------------------------------------------------------------
# Rounding


class TiePolicy(enum.Enum):
    HALF_UP = "half-up"
    HALF_DOWN = "half-down"
    HALF_EVEN = "half-even"


class RoundingKind(enum.Enum):
    FLOOR = "floor"
    NEAREST = "nearest"


@dataclass(frozen=True)
class RoundingMode:
    kind: RoundingKind
    tie: TiePolicy = TiePolicy.HALF_UP

    def __str__(self) -> str:
        if self.kind is RoundingKind.FLOOR:
            return "floor"
        return f"nearest({self.tie.value})"


FLOOR = RoundingMode(RoundingKind.FLOOR)
NEAREST = RoundingMode(RoundingKind.NEAREST)


def nearest(tie: TiePolicy = TiePolicy.HALF_UP) -> RoundingMode:
    return RoundingMode(RoundingKind.NEAREST, tie)


def round_rational(q: Union[int, Fraction], mode: RoundingMode) -> int:
    q = Fraction(q)
    p, d = q.numerator, q.denominator
    if mode.kind is RoundingKind.FLOOR:
        return p // d
    if d != 2:
        return (2 * p + d) // (2 * d)
    # half-integer p/2 with p odd
    up = (p + 1) // 2
    if mode.tie is TiePolicy.HALF_UP:
        return up
    if mode.tie is TiePolicy.HALF_DOWN:
        return up - 1
    return up if up % 2 == 0 else up - 1


# ---------------------------------------------------------------------------
# Enclosures


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval known to contain a real value."""

    lower: Fraction
    upper: Fraction
    precision_bits: int

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise DomainError(f"empty enclosure [{self.lower}, {self.upper}]")
        if self.precision_bits < 1:
            raise DomainError("precision_bits must be positive")

    @classmethod
    def exact(cls, q: Union[int, Fraction], precision_bits: int = 1) -> "Enclosure":
        q = Fraction(q)
        return cls(q, q, precision_bits)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    def contains(self, q: Union[int, Fraction]) -> bool:
        return self.lower <= q <= self.upper

    def scale(self, c: Union[int, Fraction]) -> "Enclosure":
        c = Fraction(c)
        a, b = self.lower * c, self.upper * c
        return Enclosure(min(a, b), max(a, b), self.precision_bits)

    def __add__(self, other: Union["Enclosure", int, Fraction]) -> "Enclosure":
        if isinstance(other, Enclosure):
            return Enclosure(
                self.lower + other.lower,
                self.upper + other.upper,
                min(self.precision_bits, other.precision_bits),
            )
        return Enclosure(self.lower + other, self.upper + other, self.precision_bits)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.upper, -self.lower, self.precision_bits)

    def __sub__(self, other: Union["Enclosure", int, Fraction]) -> "Enclosure":
        return self + (-other)


Refiner = Callable[[int], Enclosure]


def round_enclosure(
    e: Enclosure,
    mode: RoundingMode,
    refine: Optional[Refiner] = None,
    cap: Optional[int] = None,
) -> int:
    """Round the value enclosed by ``e``.

    ``refine(bits)`` must return an enclosure of the same value at more than
    the current precision. Raises :class:`Undecidable` if the enclosure still
    straddles a rounding boundary once ``cap`` bits are reached (or no
    refiner is given).
    """
    cap = precision_cap() if cap is None else cap
    while True:
        lo = round_rational(e.lower, mode)
        if lo == round_rational(e.upper, mode):
            return lo
        if refine is None or e.precision_bits >= cap:
            raise Undecidable(e)
        bits = min(2 * e.precision_bits, cap)
        tighter = refine(bits)
        if tighter.precision_bits <= e.precision_bits:
            raise DomainError("refine() did not increase precision")
        # intersect so that refinement never widens the interval
        e = Enclosure(
            max(e.lower, tighter.lower),
            min(e.upper, tighter.upper),
            tighter.precision_bits,
        )


# ---------------------------------------------------------------------------
# Enclosure constructors used by the builtin functions


def sqrt_enclosure(q: Union[int, Fraction], bits: int) -> Enclosure:
    """Enclose sqrt(q) for rational q >= 0 to within 2**-bits / denominator."""
    q = Fraction(q)
    if q < 0:
        raise DomainError("sqrt of a negative rational")
    p, d = q.numerator, q.denominator
    rp, rd = math.isqrt(p), math.isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Enclosure.exact(Fraction(rp, rd), bits)
    # sqrt(p/d) = sqrt(p*d)/d
    scale = 1 << bits
    s = math.isqrt(p * d * scale * scale)
    denom = d * scale
    if s * s == p * d * scale * scale:
        return Enclosure.exact(Fraction(s, denom), bits)
    return Enclosure(Fraction(s, denom), Fraction(s + 1, denom), bits)


def exact_sqrt(q: Union[int, Fraction]) -> Optional[Fraction]:
    q = Fraction(q)
    if q < 0:
        return None
    rp, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rp * rp == q.numerator and rd * rd == q.denominator:
        return Fraction(rp, rd)
    return None


def mpf_to_fraction(raw) -> Fraction:
    """Convert an mpmath raw mpf tuple ``(sign, man, exp, bc)`` exactly."""
    sign, man, exp, _ = raw
    if man == 0 and exp != 0:
        raise DomainError("non-finite mpf value")
    v = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -v if sign else v


def interval_to_enclosure(value, bits: int) -> Enclosure:
    """Convert an ``mpmath.iv`` interval to an :class:`Enclosure`."""
    lo_raw, hi_raw = value._mpi_
    return Enclosure(mpf_to_fraction(lo_raw), mpf_to_fraction(hi_raw), bits)
