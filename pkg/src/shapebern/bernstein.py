"""Polynomials in the Bernstein basis with exact rational coefficients."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from .exact import DomainError, binomial, format_rational, parse_rational

Number = Union[int, Fraction]


@dataclass(frozen=True)
class BernsteinPoly:
    """sum_k coeffs[k] * C(n,k) x^k (1-x)^(n-k) with n = len(coeffs) - 1."""

    coeffs: Tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence[Number]):
        if len(coeffs) == 0:
            raise DomainError("a Bernstein polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: Number) -> Fraction:
        return evaluate(self, x)

    def __add__(self, other: "BernsteinPoly") -> "BernsteinPoly":
        if other.degree != self.degree:
            raise DomainError("degree mismatch in Bernstein sum")
        return BernsteinPoly([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "BernsteinPoly":
        return BernsteinPoly([-c for c in self.coeffs])

    def __sub__(self, other: "BernsteinPoly") -> "BernsteinPoly":
        return self + (-other)


@dataclass(frozen=True)
class IntegerBernsteinPoly:
    """sum_k int_coeffs[k] * x^k (1-x)^(n-k): the form produced by the
    integer-coefficient operators."""

    int_coeffs: Tuple[int, ...]

    def __init__(self, int_coeffs: Sequence[int]):
        if len(int_coeffs) == 0:
            raise DomainError("need at least one coefficient")
        for c in int_coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise TypeError(f"integer coefficient expected, got {c!r}")
        object.__setattr__(self, "int_coeffs", tuple(int_coeffs))

    @property
    def degree(self) -> int:
        return len(self.int_coeffs) - 1

    def to_bernstein(self) -> BernsteinPoly:
        n = self.degree
        return BernsteinPoly(
            [Fraction(c, binomial(n, k)) for k, c in enumerate(self.int_coeffs)]
        )

    @classmethod
    def from_bernstein(cls, p: BernsteinPoly) -> "IntegerBernsteinPoly":
        n = p.degree
        out = []
        for k, b in enumerate(p.coeffs):
            c = b * binomial(n, k)
            if c.denominator != 1:
                raise DomainError(f"coefficient {k} is not integral in the scaled basis")
            out.append(c.numerator)
        return cls(out)

    def __call__(self, x: Number) -> Fraction:
        return evaluate(self.to_bernstein(), x)


def _as_bernstein(p: Union[BernsteinPoly, IntegerBernsteinPoly]) -> BernsteinPoly:
    return p.to_bernstein() if isinstance(p, IntegerBernsteinPoly) else p


# ---------------------------------------------------------------------------
# Core operations


def evaluate(p: Union[BernsteinPoly, IntegerBernsteinPoly], x: Number) -> Fraction:
    """Exact value at ``x`` by de Casteljau's algorithm (any rational x)."""
    p = _as_bernstein(p)
    x = Fraction(x)
    y = 1 - x
    row = list(p.coeffs)
    for r in range(p.degree):
        row = [y * row[i] + x * row[i + 1] for i in range(len(row) - 1)]
    return row[0]


def derivative(p: BernsteinPoly) -> BernsteinPoly:
    p = _as_bernstein(p)
    n = p.degree
    if n < 1:
        raise DomainError("derivative needs degree >= 1")
    b = p.coeffs
    return BernsteinPoly([n * (b[k + 1] - b[k]) for k in range(n)])


def second_derivative(p: BernsteinPoly) -> BernsteinPoly:
    p = _as_bernstein(p)
    n = p.degree
    if n < 2:
        raise DomainError("second derivative needs degree >= 2")
    b = p.coeffs
    return BernsteinPoly(
        [n * (n - 1) * (b[k + 2] - 2 * b[k + 1] + b[k]) for k in range(n - 1)]
    )


def subdivide(p: BernsteinPoly) -> Tuple[BernsteinPoly, BernsteinPoly]:
    """Split at x = 1/2; both halves are reparametrized to [0, 1]."""
    p = _as_bernstein(p)
    half = Fraction(1, 2)
    row = list(p.coeffs)
    left, right = [row[0]], [row[-1]]
    while len(row) > 1:
        row = [half * (row[i] + row[i + 1]) for i in range(len(row) - 1)]
        left.append(row[0])
        right.append(row[-1])
    return BernsteinPoly(left), BernsteinPoly(right[::-1])


def reflect(p: BernsteinPoly) -> BernsteinPoly:
    """The polynomial x -> p(1 - x)."""
    p = _as_bernstein(p)
    return BernsteinPoly(p.coeffs[::-1])


def to_power_basis(p: Union[BernsteinPoly, IntegerBernsteinPoly]) -> List[Fraction]:
    p = _as_bernstein(p)
    n = p.degree
    out = [Fraction(0)] * (n + 1)
    for k, b in enumerate(p.coeffs):
        if not b:
            continue
        ck = binomial(n, k) * b
        # C(n,k) x^k (1-x)^(n-k) = C(n,k) sum_i C(n-k,i) (-1)^i x^(k+i)
        for i in range(n - k + 1):
            term = ck * binomial(n - k, i)
            out[k + i] += -term if i % 2 else term
    return out


def from_power_basis(a: Sequence[Number], degree: int = None) -> BernsteinPoly:
    """Bernstein form of sum_j a[j] x^j, optionally at a degree above len(a)-1."""
    a = [Fraction(c) for c in a]
    n = len(a) - 1 if degree is None else degree
    if n < len(a) - 1:
        if any(a[n + 1:]):
            raise DomainError("degree too small for the given power coefficients")
        a = a[: n + 1]
    # x^j = sum_{k>=j} C(k,j)/C(n,j) p_{n,k}
    b = [Fraction(0)] * (n + 1)
    for j, aj in enumerate(a):
        if not aj:
            continue
        scale = aj / binomial(n, j)
        for k in range(j, n + 1):
            b[k] += scale * binomial(k, j)
    return BernsteinPoly(b)


def strip_power(a: Sequence[Fraction]) -> List[Fraction]:
    """Drop trailing zero power coefficients (keeps at least one entry)."""
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


# ---------------------------------------------------------------------------
# JSON


def poly_to_json(
    p: Union[BernsteinPoly, IntegerBernsteinPoly], basis: str = None
) -> dict:
    if basis is None:
        basis = "bernstein-integer" if isinstance(p, IntegerBernsteinPoly) else "bernstein"
    if basis == "bernstein-integer":
        if not isinstance(p, IntegerBernsteinPoly):
            p = IntegerBernsteinPoly.from_bernstein(p)
        return {"degree": p.degree, "basis": basis, "coeffs": [str(c) for c in p.int_coeffs]}
    if basis == "bernstein":
        p = _as_bernstein(p)
        return {"degree": p.degree, "basis": basis, "coeffs": [format_rational(c) for c in p.coeffs]}
    if basis == "power":
        a = strip_power(to_power_basis(p))
        return {"degree": len(a) - 1, "basis": basis, "coeffs": [format_rational(c) for c in a]}
    raise DomainError(f"unknown basis {basis!r}")


def poly_from_json(obj: Union[dict, str]) -> Union[BernsteinPoly, IntegerBernsteinPoly]:
    if isinstance(obj, str):
        obj = json.loads(obj)
    basis = obj.get("basis", "bernstein")
    coeffs = [parse_rational(c) for c in obj["coeffs"]]
    degree = obj.get("degree", len(coeffs) - 1)
    if basis == "bernstein-integer":
        if any(c.denominator != 1 for c in coeffs):
            raise DomainError("bernstein-integer coefficients must be integers")
        p = IntegerBernsteinPoly([c.numerator for c in coeffs])
    elif basis == "bernstein":
        p = BernsteinPoly(coeffs)
    elif basis == "power":
        return from_power_basis(coeffs, max(degree, len(coeffs) - 1))
    else:
        raise DomainError(f"unknown basis {basis!r}")
    if p.degree != degree:
        raise DomainError(f"degree {degree} does not match {len(coeffs)} coefficients")
    return p
