"""Correction functions at the grid points k/n and the asymptotic envelopes.

Grid tables come from the exact first/second difference identities of each
correction function plus its anchor values; they are never computed by
quadrature (see :mod:`shapebern.quadrature` for the independent cross-check).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Union

from mpmath import iv

from .bernstein import BernsteinPoly, from_power_basis
from .exact import (
    DomainError,
    Enclosure,
    binomial,
    format_rational,
    interval_to_enclosure,
)

Number = Union[int, Fraction]


class CorrectionKind(enum.Enum):
    PHI_INC = "phi-inc"
    PSI_DEC = "psi-dec"
    TILDE_VARPHI = "tilde-varphi"
    VARPHI_THM3M = "varphi-thm3m"
    PHI_ENTROPY = "phi-entropy"
    PHI_CONVEX_N = "phi-convex-n"


class EnvelopeKind(enum.Enum):
    EPSILON_MONOTONE = "epsilon-monotone"
    EPSILON_CONVEX = "epsilon-convex"
    ETA_MONOTONE = "eta-monotone"
    ETA_CONVEX = "eta-convex"


MIN_N = {
    CorrectionKind.PHI_INC: 3,
    CorrectionKind.PSI_DEC: 3,
    CorrectionKind.TILDE_VARPHI: 3,
    CorrectionKind.VARPHI_THM3M: 3,
    CorrectionKind.PHI_ENTROPY: 1,
    CorrectionKind.PHI_CONVEX_N: 3,
}


@dataclass(frozen=True)
class CorrectionTable:
    kind: CorrectionKind
    n: int
    entries: Dict[int, Union[Fraction, Enclosure]] = field(default_factory=dict)

    def __getitem__(self, k: int):
        return self.entries[k]

    def first_differences(self) -> Dict[int, Fraction]:
        """value(k+1) - value(k) for consecutive keys k, k+1 in the table."""
        e = self.entries
        return {k: e[k + 1] - e[k] for k in sorted(e) if k + 1 in e}

    def second_differences(self) -> Dict[int, Fraction]:
        e = self.entries
        return {
            k: e[k + 2] - 2 * e[k + 1] + e[k]
            for k in sorted(e)
            if k + 1 in e and k + 2 in e
        }

    def to_json(self) -> dict:
        out = {}
        for k, v in sorted(self.entries.items()):
            if isinstance(v, Enclosure):
                out[str(k)] = {
                    "lower": format_rational(v.lower),
                    "upper": format_rational(v.upper),
                }
            else:
                out[str(k)] = format_rational(v)
        return {"kind": self.kind.value, "n": self.n, "entries": out}


def _inv_binom(n: int, k: int) -> Fraction:
    return Fraction(1, binomial(n, k))


def convex_n_second_difference(n: int, k: int) -> Fraction:
    """Exact grid second difference of Phi_n at k: 1/C(n,k) + 1/C(n,k+2)."""
    return _inv_binom(n, k) + _inv_binom(n, k + 2)


@lru_cache(maxsize=512)
def _grid(kind: CorrectionKind, n: int) -> CorrectionTable:
    if kind is CorrectionKind.PHI_INC:
        # phi_n(0) = 0, phi_n(1/n) = 1/n, increments 1/C(n,k+1)
        e = {0: Fraction(0), 1: Fraction(1, n)}
        for k in range(1, n - 1):
            e[k + 1] = e[k] + _inv_binom(n, k + 1)
    elif kind is CorrectionKind.PSI_DEC:
        # psi_n(1/n) = 0, increments 1/C(n,k); the step k = n-1 reaches x = 1
        e = {1: Fraction(0)}
        for k in range(1, n):
            e[k + 1] = e[k] + _inv_binom(n, k)
    elif kind in (CorrectionKind.TILDE_VARPHI, CorrectionKind.VARPHI_THM3M):
        scale = 1 if kind is CorrectionKind.TILDE_VARPHI else 2
        e = {1: Fraction(0)}
        for k in range(1, n - 1):
            step = (_inv_binom(n, k) + _inv_binom(n, k + 1)) / 2
            e[k + 1] = e[k] + scale * step
    elif kind is CorrectionKind.PHI_CONVEX_N:
        # anchors Phi_n(2/n) = Phi_n(3/n) = 0, recursion run both ways
        e = {2: Fraction(0), 3: Fraction(0)}
        for k in range(2, n - 1):
            e[k + 2] = convex_n_second_difference(n, k) + 2 * e[k + 1] - e[k]
        for k in (1, 0):
            e[k] = convex_n_second_difference(n, k) + 2 * e[k + 1] - e[k + 2]
    elif kind is CorrectionKind.PHI_ENTROPY:
        e = {k: entropy_phi(Fraction(k, n)) for k in range(n + 1)}
    else:  # pragma: no cover
        raise DomainError(f"unknown correction kind {kind}")
    return CorrectionTable(kind, n, dict(sorted(e.items())))


def correction_grid(kind: Union[CorrectionKind, str], n: int) -> CorrectionTable:
    kind = CorrectionKind(kind)
    if n < MIN_N[kind]:
        raise DomainError(f"{kind.value} table needs n >= {MIN_N[kind]}, got {n}")
    return _grid(kind, n)


# ---------------------------------------------------------------------------
# Entropy function 6 (x ln x + (1-x) ln(1-x))

DEFAULT_ENTROPY_BITS = 96


def entropy_phi(x: Number, precision: int = DEFAULT_ENTROPY_BITS) -> Enclosure:
    """Guaranteed enclosure of 6(x ln x + (1-x) ln(1-x)); exact 0 at 0 and 1."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise DomainError("entropy function is defined on [0, 1]")
    if x == 0 or x == 1:
        return Enclosure.exact(0, precision)
    old = iv.prec
    try:
        iv.prec = precision + 8
        xi = iv.mpf(x.numerator) / x.denominator
        yi = iv.mpf(x.denominator - x.numerator) / x.denominator
        value = 6 * (xi * iv.log(xi) + yi * iv.log(yi))
        return interval_to_enclosure(value, precision)
    finally:
        iv.prec = old


@lru_cache(maxsize=1024)
def entropy_second_differences(n: int, precision: int = DEFAULT_ENTROPY_BITS) -> List[Enclosure]:
    """Enclosures of Phi((k+2)/n) - 2 Phi((k+1)/n) + Phi(k/n), k = 0..n-2."""
    vals = [entropy_phi(Fraction(k, n), precision) for k in range(n + 1)]
    return [vals[k + 2] - vals[k + 1].scale(2) + vals[k] for k in range(n - 1)]


# ---------------------------------------------------------------------------
# Envelopes


def _check_envelope_n(kind: EnvelopeKind, n: int) -> None:
    need = 2 if kind in (EnvelopeKind.EPSILON_MONOTONE, EnvelopeKind.ETA_MONOTONE) else 6
    if n < need:
        raise DomainError(f"{kind.value} needs n >= {need}, got {n}")


def _epsilon_monotone(n: int, x: Fraction) -> Fraction:
    return 2 * x / (n - 1) + x**n / n + x ** (n - 1) * (1 - x)


def _concave_part(n: int, x: Fraction) -> Fraction:
    y = 1 - x
    return (
        6 * x**2 / (n - 2)
        - Fraction(2 * (n - 3), n * (n - 1)) * (x**n + y**n)
        + Fraction(4, n - 1) * (x ** (n - 1) + y ** (n - 1))
    )


def _epsilon_convex(n: int, x: Fraction) -> Fraction:
    y = 1 - x
    return _concave_part(n, x) + x ** (n - 2) * y + x * y ** (n - 2)


def envelope(kind: Union[EnvelopeKind, str], n: int, x: Number) -> Fraction:
    """Exact value of an asymptotic envelope at rational ``x``.

    ETA_CONVEX is the envelope for concave inputs: its second derivative is
    minus the bound on the rounding loss of the floor operator for concave f.
    """
    kind = EnvelopeKind(kind)
    _check_envelope_n(kind, n)
    x = Fraction(x)
    if kind is EnvelopeKind.EPSILON_MONOTONE:
        return _epsilon_monotone(n, x)
    if kind is EnvelopeKind.ETA_MONOTONE:
        return _epsilon_monotone(n, 1 - x)
    if kind is EnvelopeKind.EPSILON_CONVEX:
        return _epsilon_convex(n, x)
    return -_concave_part(n, x)


def _binomial_power(n: int, sign: int) -> List[Fraction]:
    """Power coefficients of (sign*x + (1 if sign < 0 else 0))**n, i.e. x^n or (1-x)^n."""
    if sign > 0:
        return [Fraction(0)] * n + [Fraction(1)]
    return [Fraction((-1) ** j * binomial(n, j)) for j in range(n + 1)]


def _padd(a: List[Fraction], b: List[Fraction], c: Fraction = Fraction(1)) -> List[Fraction]:
    m = max(len(a), len(b))
    a = a + [Fraction(0)] * (m - len(a))
    return [a[i] + (c * b[i] if i < len(b) else 0) for i in range(m)]


def _pmul_x(a: List[Fraction], j: int) -> List[Fraction]:
    return [Fraction(0)] * j + a


def _pmul_1mx(a: List[Fraction], j: int) -> List[Fraction]:
    out = a
    for _ in range(j):
        out = _padd(out + [Fraction(0)], [Fraction(0)] + out, Fraction(-1))
    return out


def envelope_power_coeffs(kind: Union[EnvelopeKind, str], n: int) -> List[Fraction]:
    """Exact power-basis coefficients of the envelope polynomial (degree n)."""
    kind = EnvelopeKind(kind)
    _check_envelope_n(kind, n)
    xn = _binomial_power(n, 1)
    yn = _binomial_power(n, -1)
    xn1 = _binomial_power(n - 1, 1)
    yn1 = _binomial_power(n - 1, -1)
    if kind in (EnvelopeKind.EPSILON_MONOTONE, EnvelopeKind.ETA_MONOTONE):
        p = [Fraction(0), Fraction(2, n - 1)]
        p = _padd(p, xn, Fraction(1, n))
        p = _padd(p, _pmul_1mx(xn1, 1))
        if kind is EnvelopeKind.ETA_MONOTONE:
            p = _compose_reflect(p)
        return p
    p = [Fraction(0), Fraction(0), Fraction(6, n - 2)]
    p = _padd(p, _padd(xn, yn), Fraction(-2 * (n - 3), n * (n - 1)))
    p = _padd(p, _padd(xn1, yn1), Fraction(4, n - 1))
    if kind is EnvelopeKind.ETA_CONVEX:
        return [-c for c in p]
    p = _padd(p, _pmul_1mx(_binomial_power(n - 2, 1), 1))
    p = _padd(p, _pmul_x(_binomial_power(n - 2, -1), 1))
    return p


def _compose_reflect(a: List[Fraction]) -> List[Fraction]:
    """Power coefficients of p(1 - x) given those of p(x)."""
    out = [Fraction(0)]
    for j, aj in enumerate(a):
        if aj:
            out = _padd(out, _binomial_power(j, -1), aj)
    return out


def envelope_poly(kind: Union[EnvelopeKind, str], n: int) -> BernsteinPoly:
    return from_power_basis(envelope_power_coeffs(kind, n), n)
