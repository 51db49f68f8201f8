"""Certify or refute monotonicity and convexity of Bernstein polynomials, and
check the grid inequalities behind each sufficient condition.

Sign certification works on integer-scaled control values: every subdivision
step multiplies a piece by a positive power of two, which never changes the
sign pattern, so the whole search runs in plain integer arithmetic.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .bernstein import (
    BernsteinPoly,
    IntegerBernsteinPoly,
    derivative,
    evaluate,
    second_derivative,
)
from .corrections import (
    CorrectionKind,
    correction_grid,
    convex_n_second_difference,
    entropy_second_differences,
)
from .exact import DomainError, Enclosure, binomial, format_rational, precision_cap

DEFAULT_DEPTH_CAP = 40


class ShapeQuery(enum.Enum):
    MONOTONE_INCREASING = "monotone-increasing"
    MONOTONE_DECREASING = "monotone-decreasing"
    CONVEX = "convex"
    CONCAVE = "concave"

    @property
    def order(self) -> int:
        return 1 if self in (ShapeQuery.MONOTONE_INCREASING, ShapeQuery.MONOTONE_DECREASING) else 2

    @property
    def sign(self) -> int:
        return 1 if self in (ShapeQuery.MONOTONE_INCREASING, ShapeQuery.CONVEX) else -1


class Status(enum.Enum):
    CERTIFIED_BY_COEFFICIENTS = "certified-by-coefficients"
    CERTIFIED_BY_SUBDIVISION = "certified-by-subdivision"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Certificate:
    status: Status
    query: Optional[ShapeQuery] = None
    depth: int = 0
    depth_cap: int = DEFAULT_DEPTH_CAP
    witness_x: Optional[Fraction] = None
    witness_value: Optional[Fraction] = None

    @property
    def certified(self) -> bool:
        return self.status in (Status.CERTIFIED_BY_COEFFICIENTS, Status.CERTIFIED_BY_SUBDIVISION)

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    def to_json(self) -> dict:
        out = {
            "query": self.query.value if self.query else "nonnegative",
            "status": self.status.value,
            "depth": self.depth,
        }
        if self.status is Status.UNKNOWN:
            out["depth_cap"] = self.depth_cap
        if self.witness_x is not None:
            out["witness"] = {
                "x": format_rational(self.witness_x),
                "value": format_rational(self.witness_value),
            }
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        q = obj.get("query")
        w = obj.get("witness")
        return cls(
            status=Status(obj["status"]),
            query=None if q in (None, "nonnegative") else ShapeQuery(q),
            depth=obj.get("depth", 0),
            depth_cap=obj.get("depth_cap", DEFAULT_DEPTH_CAP),
            witness_x=Fraction(w["x"]) if w else None,
            witness_value=Fraction(w["value"]) if w else None,
        )


def _bern(p: Union[BernsteinPoly, IntegerBernsteinPoly]) -> BernsteinPoly:
    return p.to_bernstein() if isinstance(p, IntegerBernsteinPoly) else p


def _check_degree(p: BernsteinPoly, q: ShapeQuery) -> None:
    if p.degree < q.order:
        raise DomainError(f"{q.value} needs degree >= {q.order}, got {p.degree}")


def coefficient_shape_test(p: Union[BernsteinPoly, IntegerBernsteinPoly], q: ShapeQuery) -> bool:
    """Sufficient test: signed first/second differences of the control values."""
    p = _bern(p)
    _check_degree(p, q)
    b = p.coeffs
    if q.order == 1:
        diffs = [b[k + 1] - b[k] for k in range(p.degree)]
    else:
        diffs = [b[k + 2] - 2 * b[k + 1] + b[k] for k in range(p.degree - 1)]
    if q.sign > 0:
        return all(d >= 0 for d in diffs)
    return all(d <= 0 for d in diffs)


def _integer_coeffs(coeffs: Sequence[Fraction]) -> List[int]:
    den = lcm(*(c.denominator for c in coeffs))
    return [c.numerator * (den // c.denominator) for c in coeffs]


def _split(a: List[int]) -> Tuple[List[int], List[int]]:
    """Midpoint de Casteljau on integers; both halves scaled by 2**n."""
    n = len(a) - 1
    row = a
    left, right = [a[0] << n], [a[-1] << n]
    for j in range(1, n + 1):
        row = [row[i] + row[i + 1] for i in range(len(row) - 1)]
        left.append(row[0] << (n - j))
        right.append(row[-1] << (n - j))
    right.reverse()
    return left, right


def certify_nonnegative(
    p: Union[BernsteinPoly, IntegerBernsteinPoly],
    depth_cap: int = DEFAULT_DEPTH_CAP,
    query: Optional[ShapeQuery] = None,
) -> Certificate:
    """Decide p >= 0 on [0, 1] by midpoint subdivision.

    Pieces are processed breadth first; the candidate witnesses are the
    endpoints of [0, 1] and then every subdivision midpoint. A returned
    witness value is the exact value of ``p`` there.
    """
    if depth_cap < 0:
        raise DomainError("depth_cap must be >= 0")
    p = _bern(p)
    a = _integer_coeffs(p.coeffs)
    if all(c >= 0 for c in a):
        return Certificate(Status.CERTIFIED_BY_COEFFICIENTS, query, 0, depth_cap)
    for x, c in ((Fraction(0), a[0]), (Fraction(1), a[-1])):
        if c < 0:
            return Certificate(Status.REFUTED, query, 0, depth_cap, x, evaluate(p, x))

    # (coefficients, left end numerator j, depth): piece is [j/2^d, (j+1)/2^d]
    queue = deque([(a, 0, 0)])
    max_depth = 0
    unknown = False
    while queue:
        coeffs, j, d = queue.popleft()
        if min(coeffs) >= 0:
            max_depth = max(max_depth, d)
            continue
        if d >= depth_cap:
            unknown = True
            continue
        left, right = _split(coeffs)
        if left[-1] < 0:
            x = Fraction(2 * j + 1, 2 ** (d + 1))
            return Certificate(Status.REFUTED, query, d + 1, depth_cap, x, evaluate(p, x))
        queue.append((left, 2 * j, d + 1))
        queue.append((right, 2 * j + 1, d + 1))
    if unknown:
        return Certificate(Status.UNKNOWN, query, depth_cap, depth_cap)
    return Certificate(Status.CERTIFIED_BY_SUBDIVISION, query, max_depth, depth_cap)


def shape_polynomial(p: Union[BernsteinPoly, IntegerBernsteinPoly], q: ShapeQuery) -> BernsteinPoly:
    """The derivative whose sign decides ``q`` (not negated)."""
    p = _bern(p)
    _check_degree(p, q)
    return derivative(p) if q.order == 1 else second_derivative(p)


def certify_shape(
    p: Union[BernsteinPoly, IntegerBernsteinPoly],
    q: ShapeQuery,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> Certificate:
    """Certificate for ``q``; a witness carries the value of the (first or
    second) derivative itself, which has the wrong sign for ``q``."""
    d = shape_polynomial(p, q)
    target = d if q.sign > 0 else -d
    cert = certify_nonnegative(target, depth_cap, q)
    if cert.refuted and q.sign < 0:
        cert = Certificate(
            cert.status, q, cert.depth, depth_cap, cert.witness_x, -cert.witness_value
        )
    return cert


def sign_change_brackets(
    p: Union[BernsteinPoly, IntegerBernsteinPoly], depth: int = 30
) -> List[Tuple[Fraction, Fraction]]:
    """Dyadic intervals of width 2**-depth on which ``p`` changes sign.

    Pieces whose control values have no sign variation are discarded; a
    piece with one variation and opposite-signed ends is bisected down to
    the requested width.
    """
    p = _bern(p)
    out: List[Tuple[Fraction, Fraction]] = []
    stack = [(_integer_coeffs(p.coeffs), 0, 0)]
    while stack:
        a, j, d = stack.pop()
        signs = [c > 0 for c in a if c != 0]
        variations = sum(1 for s, t in zip(signs, signs[1:]) if s != t)
        if variations == 0:
            continue
        if d >= depth:
            if a[0] * a[-1] < 0:
                out.append((Fraction(j, 2**d), Fraction(j + 1, 2**d)))
            continue
        left, right = _split(a)
        stack.append((right, 2 * j + 1, d + 1))
        stack.append((left, 2 * j, d + 1))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Grid hypotheses


class HypothesisId(enum.Enum):
    THM1M_A = "Thm1m_a"
    THM1M_B = "Thm1m_b"
    THM3M_A = "Thm3m_a"
    THM3M_B = "Thm3m_b"
    PROP_PHI_INC = "PropPhiInc"
    PROP_PSI_DEC = "PropPsiDec"
    PROP_TILDE_VARPHI_A = "PropTildeVarphi_a"
    PROP_TILDE_VARPHI_B = "PropTildeVarphi_b"
    THM1C_A = "Thm1c_a"
    THM1C_B = "Thm1c_b"
    THM3C_A = "Thm3c_a"
    THM3C_B = "Thm3c_b"
    PROP_CONVEX_FLOOR = "PropConvexFloor"
    PROP_CONCAVE_FLOOR = "PropConcaveFloor"
    PROP_CONVEX_NEAREST = "PropConvexNearest"
    PROP_CONCAVE_NEAREST = "PropConcaveNearest"


_BOTH = ("floor", "nearest")

# id -> (shape guaranteed, operators covered)
HYPOTHESIS_TARGETS: Dict[HypothesisId, Tuple[ShapeQuery, Tuple[str, ...]]] = {
    HypothesisId.THM1M_A: (ShapeQuery.MONOTONE_INCREASING, _BOTH),
    HypothesisId.THM1M_B: (ShapeQuery.MONOTONE_DECREASING, _BOTH),
    HypothesisId.THM3M_A: (ShapeQuery.MONOTONE_INCREASING, _BOTH),
    HypothesisId.THM3M_B: (ShapeQuery.MONOTONE_DECREASING, _BOTH),
    HypothesisId.PROP_PHI_INC: (ShapeQuery.MONOTONE_INCREASING, ("floor",)),
    HypothesisId.PROP_PSI_DEC: (ShapeQuery.MONOTONE_DECREASING, ("floor",)),
    HypothesisId.PROP_TILDE_VARPHI_A: (ShapeQuery.MONOTONE_INCREASING, ("nearest",)),
    HypothesisId.PROP_TILDE_VARPHI_B: (ShapeQuery.MONOTONE_DECREASING, ("nearest",)),
    HypothesisId.THM1C_A: (ShapeQuery.CONVEX, _BOTH),
    HypothesisId.THM1C_B: (ShapeQuery.CONCAVE, _BOTH),
    HypothesisId.THM3C_A: (ShapeQuery.CONVEX, _BOTH),
    HypothesisId.THM3C_B: (ShapeQuery.CONCAVE, _BOTH),
    HypothesisId.PROP_CONVEX_FLOOR: (ShapeQuery.CONVEX, ("floor",)),
    HypothesisId.PROP_CONCAVE_FLOOR: (ShapeQuery.CONCAVE, ("floor",)),
    HypothesisId.PROP_CONVEX_NEAREST: (ShapeQuery.CONVEX, ("nearest",)),
    HypothesisId.PROP_CONCAVE_NEAREST: (ShapeQuery.CONCAVE, ("nearest",)),
}

Margin = Union[Fraction, Enclosure]


def _inv(n: int, k: int) -> Fraction:
    return Fraction(1, binomial(n, k))


def hypothesis_margins(hid: Union[HypothesisId, str], n: int) -> List[Margin]:
    """Lower bounds m_k for the signed differences s * Delta^r f(k/n).

    The hypothesis holds iff s * (difference k) >= m_k for every k, where r
    and s come from the target shape (r = 1: k = 0..n-1; r = 2: k = 0..n-2).
    Irrational margins (the entropy function) are returned as enclosures.
    """
    hid = HypothesisId(hid)
    q, _ = HYPOTHESIS_TARGETS[hid]
    if q.order == 1:
        return _monotone_margins(hid, n)
    return _convex_margins(hid, n)


def _monotone_margins(hid: HypothesisId, n: int) -> List[Margin]:
    if hid in (HypothesisId.THM1M_A, HypothesisId.THM1M_B):
        return [Fraction(1, n)] * n
    # boundary steps k = 0 and k = n-1 only need the plain shape
    m: List[Margin] = [Fraction(0)] * n
    interior = range(1, n - 1)
    if hid in (HypothesisId.THM3M_A, HypothesisId.THM3M_B):
        if n >= 3:
            steps = correction_grid(CorrectionKind.VARPHI_THM3M, n).first_differences()
            for k in interior:
                m[k] = steps[k]
    elif hid is HypothesisId.PROP_PHI_INC:
        for k in interior:
            m[k] = _inv(n, k + 1)
    elif hid is HypothesisId.PROP_PSI_DEC:
        for k in interior:
            m[k] = _inv(n, k)
    else:
        for k in interior:
            m[k] = (_inv(n, k) + _inv(n, k + 1)) / 2
    return m


def _convex_margins(hid: HypothesisId, n: int) -> List[Margin]:
    if n < 2:
        return []
    ks = range(n - 1)
    if hid in (HypothesisId.THM1C_A, HypothesisId.THM1C_B):
        return list(entropy_second_differences(n))
    if hid in (HypothesisId.THM3C_A, HypothesisId.THM3C_B):
        if n < 3:
            raise DomainError("the Phi_n condition needs n >= 3")
        return [convex_n_second_difference(n, k) for k in ks]
    if hid is HypothesisId.PROP_CONCAVE_FLOOR:
        return [2 * _inv(n, k + 1) for k in ks]
    out: List[Margin] = []
    for k in ks:
        if hid is HypothesisId.PROP_CONVEX_FLOOR:
            first, last = _inv(n, 2), _inv(n, n - 2)
            mid = _inv(n, k) + _inv(n, k + 2) if 0 < k < n - 2 else None
        else:
            first = (2 * _inv(n, 1) + _inv(n, 2)) / 2
            last = (_inv(n, n - 2) + 2 * _inv(n, n - 1)) / 2
            mid = (_inv(n, k) + 2 * _inv(n, k + 1) + _inv(n, k + 2)) / 2 if 0 < k < n - 2 else None
        if k == 0 and k == n - 2:
            out.append(max(first, last))
        elif k == 0:
            out.append(first)
        elif k == n - 2:
            out.append(last)
        else:
            out.append(mid)
    return out


@dataclass(frozen=True)
class HypothesisResult:
    holds: bool
    violation: Optional[int] = None
    hypothesis: Optional[HypothesisId] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        out = {"hypothesis": self.hypothesis.value if self.hypothesis else None, "holds": self.holds}
        if self.violation is not None:
            out["first_violation"] = self.violation
        return out


def grid_differences(values: Sequence[Fraction], order: int) -> List[Fraction]:
    v = [Fraction(x) for x in values]
    if order == 1:
        return [v[k + 1] - v[k] for k in range(len(v) - 1)]
    return [v[k + 2] - 2 * v[k + 1] + v[k] for k in range(len(v) - 2)]


def _meets(diff: Fraction, margin: Margin, n: int, k: int) -> bool:
    if not isinstance(margin, Enclosure):
        return diff >= margin
    # conservative: only accept when diff clears the upper end
    bits = margin.precision_bits
    while True:
        if diff >= margin.upper:
            return True
        if diff < margin.lower or bits >= precision_cap():
            return False
        bits = min(2 * bits, precision_cap())
        margin = entropy_second_differences(n, bits)[k]


def check_hypothesis(
    values: Sequence[Union[int, Fraction]], n: int, hid: Union[HypothesisId, str]
) -> HypothesisResult:
    """Evaluate a sufficient condition on the grid samples f(k/n)."""
    hid = HypothesisId(hid)
    if len(values) != n + 1:
        raise DomainError(f"expected {n + 1} grid values, got {len(values)}")
    values = [Fraction(v) for v in values]
    for where, v in (("0", values[0]), ("1", values[-1])):
        if v.denominator != 1:
            raise DomainError(f"f({where}) = {v} must be an integer")
    q, _ = HYPOTHESIS_TARGETS[hid]
    diffs = grid_differences(values, q.order)
    margins = hypothesis_margins(hid, n)
    for k, (d, m) in enumerate(zip(diffs, margins)):
        if not _meets(q.sign * d, m, n, k):
            return HypothesisResult(False, k, hid)
    return HypothesisResult(True, None, hid)
