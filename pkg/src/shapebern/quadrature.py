"""Adaptive quadrature for the integral representations of the correction
functions and their x-derivatives.

Every integrand has the form

    scale * sum_i c_i t^p_i (1-t)^q_i L(t)^l_i / (1-2t)^d,   L = ln t - ln(1-t),

whose numerator vanishes to order d at t = 1/2. With u = 1 - 2t we have
t = (1-u)/2, 1-t = (1+u)/2 and L = ln((1-u)/(1+u)), so near t = 1/2 the
quotient is evaluated from the power series of the numerator in u instead
of the cancelling direct formula.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from mpmath import mp, mpf

from .corrections import CorrectionKind
from .exact import DomainError

WORKING_DPS = 40
GAUSS_POINTS = 20
SINGULAR_WINDOW = mpf(2) ** -20  # |t - 1/2| below this uses the series
SERIES_TERMS = 5
MIN_TOL = 1e-14
DEFAULT_BUDGET = 400_000


class DerivativeKind(enum.Enum):
    PHI_INC_PRIME = "phi-inc-prime"
    TILDE_VARPHI_PRIME = "tilde-varphi-prime"
    PHI_CONVEX_N_PRIME = "phi-convex-n-prime"
    PHI_CONVEX_N_SECOND = "phi-convex-n-second"


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, best: "QuadratureResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class QuadratureResult:
    value: mpf
    error_estimate: mpf
    evaluations: int

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class IntegrandSpec:
    """Which integral to compute: a correction kind or a derivative kind,
    the degree n and the abscissa x in [0, 1]. ``symmetric`` selects the
    symmetric representation of the increasing correction (PHI_INC only)."""

    kind: Union[CorrectionKind, DerivativeKind]
    n: int
    x: Union[Fraction, int, float, mpf]
    symmetric: bool = False


# ---------------------------------------------------------------------------
# Gauss-Legendre nodes at working precision


@lru_cache(maxsize=8)
def _gauss_legendre(m: int, dps: int) -> Tuple[Tuple[mpf, ...], Tuple[mpf, ...]]:
    guess, _ = np.polynomial.legendre.leggauss(m)
    nodes, weights = [], []
    with mpmath.workdps(dps + 10):
        for x0 in guess:
            x = mpf(float(x0))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for j in range(2, m + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = m * (x * p1 - p0) / (x * x - 1)
                step = p1 / dp
                x -= step
                if abs(step) < mpf(10) ** (-(dps + 8)):
                    break
            p0, p1 = mpf(1), x
            for j in range(2, m + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = m * (x * p1 - p0) / (x * x - 1)
            nodes.append(+x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    return tuple(nodes), tuple(weights)


def _gauss_panel(f: Callable[[mpf], mpf], a: mpf, b: mpf) -> mpf:
    nodes, weights = _gauss_legendre(GAUSS_POINTS, mp.dps)
    half, mid = (b - a) / 2, (a + b) / 2
    return half * mpmath.fsum(w * f(mid + half * x) for x, w in zip(nodes, weights))


def adaptive_integrate(
    f: Callable[[mpf], mpf],
    a=0,
    b=1,
    tol: float = 1e-12,
    breakpoints: Sequence = (),
    budget: int = DEFAULT_BUDGET,
) -> QuadratureResult:
    """Globally adaptive bisection with an open Gauss-Legendre rule.

    A panel's error is estimated by |G(panel) - G(left) - G(right)|; the
    worst panel is bisected until the summed estimate is within ``tol``.
    No node ever lies on a panel endpoint, so integrands need not be
    defined at a, b or the breakpoints.
    """
    if tol < MIN_TOL:
        raise DomainError(f"tolerance must be >= {MIN_TOL}")
    edges = sorted({mpf(a), mpf(b), *(mpf(p) for p in breakpoints)})
    evals = 0
    heap: List[Tuple[mpf, int, mpf, mpf, mpf, mpf]] = []
    counter = 0

    def panel(lo, hi, whole):
        nonlocal evals, counter
        mid = (lo + hi) / 2
        left, right = _gauss_panel(f, lo, mid), _gauss_panel(f, mid, hi)
        evals += 2 * GAUSS_POINTS
        err = abs(whole - left - right)
        counter += 1
        return (-err, counter, lo, hi, left, right)

    for lo, hi in zip(edges, edges[1:]):
        whole = _gauss_panel(f, lo, hi)
        evals += GAUSS_POINTS
        heapq.heappush(heap, panel(lo, hi, whole))

    while True:
        total_err = mpmath.fsum(-item[0] for item in heap)
        value = mpmath.fsum(item[4] + item[5] for item in heap)
        if total_err <= tol:
            return QuadratureResult(value, total_err, evals)
        if evals >= budget:
            raise ConvergenceError(
                f"tolerance {tol} not reached within {budget} evaluations",
                QuadratureResult(value, total_err, evals),
            )
        _, _, lo, hi, left, right = heapq.heappop(heap)
        mid = (lo + hi) / 2
        heapq.heappush(heap, panel(lo, mid, left))
        heapq.heappush(heap, panel(mid, hi, right))


# ---------------------------------------------------------------------------
# Integrand terms and their series about t = 1/2

Term = Tuple[mpf, object, object, int]  # (coef, p, q, log power)


def _binom_gen(p, i: int) -> mpf:
    out = mpf(1)
    for j in range(i):
        out = out * (p - j) / (j + 1)
    return out


def _series_mul(a: List[mpf], b: List[mpf], order: int) -> List[mpf]:
    out = [mpf(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def _power_series(p, q, order: int) -> List[mpf]:
    """(1-u)^p (1+u)^q as a truncated power series in u."""
    a = [_binom_gen(p, i) * (-1) ** i for i in range(order + 1)]
    b = [_binom_gen(q, i) for i in range(order + 1)]
    return _series_mul(a, b, order)


def _log_series(order: int) -> List[mpf]:
    """ln((1-u)/(1+u)) = -2 (u + u^3/3 + u^5/5 + ...)."""
    return [mpf(0) if i % 2 == 0 else mpf(-2) / i for i in range(order + 1)]


class _Integrand:
    def __init__(self, scale, terms: Sequence[Term], pole: int):
        self.scale = mpf(scale)
        self.terms = [(mpf(c), p, q, l) for c, p, q, l in terms]
        self.pole = pole
        order = pole + SERIES_TERMS - 1
        total = [mpf(0)] * (order + 1)
        for c, p, q, l in self.terms:
            s = _power_series(p, q, order)
            for _ in range(l):
                s = _series_mul(s, _log_series(order), order)
            w = c * mpf(2) ** (-(p + q))
            total = [t + w * si for t, si in zip(total, s)]
        self.leading = total[:pole]
        self.series = total[pole:]

    def numerator(self, t: mpf) -> mpf:
        s = 1 - t
        lt = None
        acc = mpf(0)
        for c, p, q, l in self.terms:
            v = c * t**p * s**q
            if l:
                if lt is None:
                    lt = mpmath.log(t) - mpmath.log(s)
                v *= lt**l
            acc += v
        return acc

    def __call__(self, t: mpf) -> mpf:
        if abs(t - mpf(1) / 2) < SINGULAR_WINDOW:
            u = 1 - 2 * t
            return self.scale * mpmath.polyval(self.series[::-1], u)
        return self.scale * self.numerator(t) / (1 - 2 * t) ** self.pole


def _exponent(n: int, x) -> object:
    """n*x, as an int when it is one (keeps grid integrands polynomial)."""
    if isinstance(x, (Fraction, int)):
        a = Fraction(x) * n
        if a.denominator == 1:
            return int(a)
        return mpf(a.numerator) / a.denominator
    a = n * mpf(x)
    return int(a) if a == int(a) else a


def _weighted(terms: Sequence[Term]) -> List[Term]:
    """Multiply by t^2 + (1-t)^2."""
    out = []
    for c, p, q, l in terms:
        out.append((c, p + 2, q, l))
        out.append((c, p, q + 2, l))
    return out


def build_integrand(spec: IntegrandSpec) -> _Integrand:
    n, kind = spec.n, spec.kind
    if n < 1:
        raise DomainError("n must be >= 1")
    if isinstance(spec.x, (Fraction, int)) and not 0 <= spec.x <= 1:
        raise DomainError("x must lie in [0, 1]")
    a = _exponent(n, spec.x)
    if spec.symmetric and kind is not CorrectionKind.PHI_INC:
        raise DomainError("the symmetric form exists for phi-inc only")
    if kind is CorrectionKind.PHI_INC:
        if spec.symmetric:
            return _Integrand(
                mpf(n + 1) / 2,
                [(1, 1, n, 0), (-1, a + 1, n - a, 0), (1, n - a, a + 1, 0), (-1, n, 1, 0)],
                1,
            )
        return _Integrand(n + 1, [(1, 1, n, 0), (-1, a + 1, n - a, 0)], 1)
    if kind is CorrectionKind.PSI_DEC:
        return _Integrand(n + 1, [(1, 1, n, 0), (-1, a, n - a + 1, 0)], 1)
    if kind in (CorrectionKind.TILDE_VARPHI, CorrectionKind.VARPHI_THM3M):
        scale = mpf(n + 1) / 2 if kind is CorrectionKind.TILDE_VARPHI else n + 1
        return _Integrand(scale, [(1, 1, n - 1, 0), (-1, a, n - a, 0)], 1)
    if kind is CorrectionKind.PHI_CONVEX_N:
        if n < 3:
            raise DomainError("Phi_n needs n >= 3")
        terms = [(a - 3, 2, n - 2, 0), (-(a - 2), 3, n - 3, 0), (1, a, n - a, 0)]
        return _Integrand(n + 1, _weighted(terms), 2)
    if kind is DerivativeKind.PHI_INC_PRIME:
        return _Integrand(-n * (n + 1), [(1, a + 1, n - a, 1)], 1)
    if kind is DerivativeKind.TILDE_VARPHI_PRIME:
        return _Integrand(-mpf(n * (n + 1)) / 2, [(1, a, n - a, 1)], 1)
    if kind is DerivativeKind.PHI_CONVEX_N_PRIME:
        if n < 3:
            raise DomainError("Phi_n needs n >= 3")
        terms = [(1, 2, n - 2, 0), (-1, 3, n - 3, 0), (1, a, n - a, 1)]
        return _Integrand(n * (n + 1), _weighted(terms), 2)
    if kind is DerivativeKind.PHI_CONVEX_N_SECOND:
        if n < 3:
            raise DomainError("Phi_n needs n >= 3")
        return _Integrand(n * n * (n + 1), _weighted([(1, a, n - a, 2)]), 2)
    raise DomainError(f"no integral representation for {kind}")


def integrate(spec: IntegrandSpec, tol: float = 1e-12, budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    """Integral over (0, 1) of the representation selected by ``spec``."""
    with mpmath.workdps(WORKING_DPS):
        f = build_integrand(spec)
        return adaptive_integrate(f, 0, 1, tol, breakpoints=(mpf(1) / 2,), budget=budget)


def integrate_derivative(spec: IntegrandSpec, tol: float = 1e-12, budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    if not isinstance(spec.kind, DerivativeKind):
        raise DomainError("integrate_derivative needs a DerivativeKind")
    return integrate(spec, tol, budget)


def beta_integral(n: int, k: int, tol: float = 1e-12) -> QuadratureResult:
    """(n+1) * integral_0^1 t^k (1-t)^(n-k) dt, which equals 1/C(n,k)."""
    if not 0 <= k <= n:
        raise DomainError("need 0 <= k <= n")
    with mpmath.workdps(WORKING_DPS):
        return adaptive_integrate(lambda t: (n + 1) * t**k * (1 - t) ** (n - k), 0, 1, tol)
