"""Cartier and Weil-nef b-divisors: incarnations, ordering, intersections, volumes.

A Cartier b-divisor is a conewise linear function psi on a determination fan;
numerical equivalence is equality up to a global linear functional. Decreasing
sequences of nef b-divisors have increasing psi's and shrinking polytopes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import fans, lp, polytopes, toric
from .fans import Fan
from .polytopes import Polytope
from .rationals import Vec, dot, fmt, rat, vec
from .toric import HermitianToricLine, ToricDivisor


@dataclass(frozen=True)
class CartierB:
    """Support function psi given by its values on the rays of a determination fan."""
    fan: Fan
    values: tuple[Fraction, ...]
    nef: bool

    def divisor(self) -> ToricDivisor:
        return _incarnation_on_own_fan(self)

    def psi(self, v: Sequence) -> Fraction:
        return toric.psi_value(self.divisor(), v)

    def polytope(self) -> Polytope:
        return toric.polytope_of_divisor(self.divisor())

    def to_json(self) -> dict:
        return {"fan": self.fan.to_json(), "psi": [fmt(x) for x in self.values]}


@lru_cache(maxsize=None)
def _incarnation_on_own_fan(b: CartierB) -> ToricDivisor:
    return toric.divisor(b.fan, [-x for x in b.values])


def cartier(fan: Fan, values: Sequence) -> CartierB:
    vals = tuple(rat(x) for x in values)
    if len(vals) != len(fan.rays):
        raise ValueError("value count mismatch")
    d = toric.divisor(fan, [-x for x in vals])
    return CartierB(fan, vals, toric.is_nef(d))


def cartier_from_json(data: dict) -> CartierB:
    return cartier(fans.fan_from_json(data["fan"]), [rat(x) for x in data["psi"]])


def zero_bdiv(fan: Fan) -> CartierB:
    return cartier(fan, [0] * len(fan.rays))


@dataclass(frozen=True)
class HermBDiv:
    """The b-divisor of a Hermitian line: psi = g on the fan refined by the slopes."""
    source: HermitianToricLine
    cartier: CartierB


def bdiv_of_metric(h: HermitianToricLine) -> HermBDiv:
    slopes = [m for m, _ in h.metric.pieces]
    fan = fans.refine_by_slopes(h.line.fan, slopes)
    return HermBDiv(h, cartier(fan, [h.metric.g(r) for r in fan.rays]))


def incarnation(b, fan: Fan) -> ToricDivisor:
    """Divisor with a_rho = -psi(v_rho) on the given complete fan."""
    if isinstance(b, WeilNefB):
        return toric.divisor(fan, [-b.limit_psi(r) for r in fan.rays])
    return toric.divisor(fan, [-b.psi(r) for r in fan.rays])


def add(b1: CartierB, b2: CartierB) -> CartierB:
    """Sum psi_1 + psi_2, determined on the common refinement."""
    if b1.fan.dim != b2.fan.dim:
        raise ValueError("dimension mismatch")
    common = fans.common_refinement(b1.fan, b2.fan)
    return cartier(common, [b1.psi(r) + b2.psi(r) for r in common.rays])


def leq(b1: CartierB, b2: CartierB) -> bool:
    """b1 <= b2: psi_1 - psi_2 + <m, .> >= 0 for some linear functional m."""
    if b1.fan.dim != b2.fan.dim:
        raise ValueError("dimension mismatch")
    common = fans.common_refinement(b1.fan, b2.fan)
    n = common.dim
    a_ub: list[list[Fraction]] = []
    b_ub: list[Fraction] = []
    for r in common.rays:
        rv = vec(r)
        a_ub.append([-x for x in rv])
        b_ub.append(b1.psi(r) - b2.psi(r))
    return lp.feasible(a_ub, b_ub) is not None


def numerically_equal(b1: CartierB, b2: CartierB) -> bool:
    return leq(b1, b2) and leq(b2, b1)


@dataclass(frozen=True)
class WeilNefB:
    """Explicit non-increasing sequence of nef Cartier b-divisors, optional exact limit."""
    approximants: tuple[CartierB, ...]
    limit: CartierB | None = None

    def limit_psi(self, v: Sequence) -> Fraction:
        if self.limit is not None:
            return self.limit.psi(v)
        return self.approximants[-1].psi(v)


def weil(approximants: Sequence[CartierB], limit: CartierB | None = None) -> WeilNefB:
    if not approximants:
        raise ValueError("empty approximant sequence")
    for b in approximants:
        if not b.nef:
            raise ValueError("intersection defined for nef inputs")
    for cur, nxt in zip(approximants, approximants[1:]):
        if not leq(nxt, cur):
            raise ValueError("approximants must be non-increasing")
    return WeilNefB(tuple(approximants), limit)


def intersect_cartier(bs: Sequence[CartierB]) -> Fraction:
    """Dang-Favre intersection number: n! times the mixed volume of the polytopes."""
    if not bs:
        raise ValueError("wrong count of bodies")
    n = bs[0].fan.dim
    if any(b.fan.dim != n for b in bs):
        raise ValueError("dimension mismatch")
    for b in bs:
        if not b.nef:
            raise ValueError("intersection defined for nef inputs")
    return math.factorial(n) * polytopes.mixed_volume([b.polytope() for b in bs])


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction
    certified: bool

    def width(self) -> Fraction:
        return self.hi - self.lo


def _as_weil(w) -> WeilNefB:
    if isinstance(w, WeilNefB):
        return w
    return WeilNefB((w,), w)


def intersect_nef(ws: Sequence, tol) -> RatInterval:
    """Diagonal of the approximant sequences, stopped at consecutive gap < tol."""
    tol = rat(tol)
    seqs = [_as_weil(w) for w in ws]
    budget = max(len(s.approximants) for s in seqs)
    prev: Fraction | None = None
    for k in range(budget):
        row = [s.approximants[min(k, len(s.approximants) - 1)] for s in seqs]
        val = intersect_cartier(row)
        if prev is not None and abs(prev - val) < tol:
            gap = prev - val
            if all(s.limit is not None for s in seqs):
                lo = intersect_cartier([s.limit for s in seqs])
                return RatInterval(lo, val, True)
            return RatInterval(val - gap, val, False)
        prev = val
    if budget == 1:
        if all(s.limit is not None for s in seqs):
            return RatInterval(intersect_cartier([s.limit for s in seqs]), prev, True)
        return RatInterval(prev, prev, False)
    raise ValueError("tolerance not reached in budget")


def vol(b, tol=Fraction(1, 10**6)):
    """Volume as the diagonal self-intersection; exact for Cartier, interval for Weil."""
    if isinstance(b, CartierB):
        n = b.fan.dim
        return intersect_cartier([b] * n)
    n = b.approximants[0].fan.dim
    return intersect_nef([b] * n, tol)


def incarnation_volumes(b: CartierB, chain: Sequence[Fan]) -> list[Fraction]:
    """n!-normalized volumes of the incarnation divisors along a refinement chain."""
    for fine, coarse in zip(chain[1:], chain):
        if not fans.refines(fine, coarse):
            raise ValueError("chain not nested")
    n = b.fan.dim
    out = []
    for f in chain:
        d = incarnation(b, f)
        out.append(math.factorial(n) * polytopes.volume(toric.polytope_of_divisor(d)))
    return out


@dataclass(frozen=True)
class ChernWeilReport:
    lhs: Fraction
    rhs: Fraction
    mid: Fraction | None
    verdict: str

    def to_json(self) -> dict:
        out = {"lhs": fmt(self.lhs), "rhs": fmt(self.rhs), "verdict": self.verdict}
        if self.mid is not None:
            out["mid"] = fmt(self.mid)
        return out


def chern_weil_line(hs: Sequence[HermitianToricLine]) -> ChernWeilReport:
    """Mass of the b-divisor intersection vs the non-pluripolar mass, never raising."""
    n = hs[0].line.fan.dim
    lhs = intersect_cartier([bdiv_of_metric(h).cartier for h in hs])
    rhs = toric.np_mass(hs)
    mid: Fraction | None = None
    if all(h.metric == hs[0].metric for h in hs):
        mid = math.factorial(n) * polytopes.volume(toric.model_polytope(hs[0].metric))
    ok = lhs == rhs and (mid is None or mid == lhs)
    return ChernWeilReport(lhs, rhs, mid, "equal" if ok else "gap")
