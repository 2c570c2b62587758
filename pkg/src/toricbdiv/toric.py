"""Toric divisors and PL metrics: polytopes, Lelong data, masses, minimal extensions.

Sign conventions: psi_D(v_rho) = -a_rho, P_D = {m : <m, v_rho> >= -a_rho}, and the
Lelong number along a ray is nu_rho = g(v_rho) - psi_D(v_rho) >= 0. Metric pieces
are affine <m_j, v> + c_j; every derived quantity uses the recession slopes, so the
model polytope is the convex hull of the slopes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import fans, polytopes
from .fans import Fan
from .linalg import solve
from .polytopes import Polytope
from .rationals import IntVec, Vec, dot, fmt, rat, vec

Piece = tuple[Vec, Fraction]


@dataclass(frozen=True)
class ToricDivisor:
    """Torus-invariant divisor sum a_rho D_rho on a fixed fan."""
    fan: Fan
    coeffs: tuple[Fraction, ...]

    def coeff(self, ray: Sequence) -> Fraction:
        i = self.fan.ray_index(ray)
        if i is None:
            raise ValueError("ray not in fan")
        return self.coeffs[i]

    def to_json(self) -> dict:
        keys = [",".join(str(x) for x in r) for r in self.fan.rays]
        return {"coeffs": {k: fmt(a) for k, a in zip(keys, self.coeffs)}}


def divisor(fan: Fan, coeffs) -> ToricDivisor:
    """Build a divisor from a ray->coefficient mapping or a ray-aligned sequence."""
    if isinstance(coeffs, Mapping):
        out = [Fraction(0)] * len(fan.rays)
        for key, val in coeffs.items():
            ray = tuple(int(x) for x in (key.split(",") if isinstance(key, str) else key))
            i = fan.ray_index(ray)
            if i is None:
                raise ValueError("ray not in fan")
            out[i] = rat(val)
        vals = tuple(out)
    else:
        vals = tuple(rat(c) for c in coeffs)
        if len(vals) != len(fan.rays):
            raise ValueError("coefficient count mismatch")
    d = ToricDivisor(fan, vals)
    for cone in fan.cones:
        if _cone_functional(d, cone) is None:
            raise ValueError("support function not linear on a cone")
    return d


def zero_divisor(fan: Fan) -> ToricDivisor:
    return divisor(fan, [0] * len(fan.rays))


def _cone_functional(d: ToricDivisor, cone: fans.Cone) -> Vec | None:
    """Linear functional m with <m, v_rho> = -a_rho on the cone's rays."""
    rows = [[Fraction(x) for x in d.fan.rays[i]] for i in cone]
    rhs = tuple(-d.coeffs[i] for i in cone)
    m = solve(rows, rhs)
    if m is None:
        return None
    for row, b in zip(rows, rhs):
        if dot(tuple(row), m) != b:
            return None
    return m


def psi_value(d: ToricDivisor, v: Sequence) -> Fraction:
    """Evaluate the support function psi_D at a point of the fan's support."""
    x = vec(v)
    cone = fans.find_cone(d.fan, x)
    if cone is None:
        raise ValueError("ray not in support")
    m = _cone_functional(d, cone)
    if m is None:
        raise ValueError("support function not linear on a cone")
    return dot(m, x)


@lru_cache(maxsize=None)
def polytope_of_divisor(d: ToricDivisor) -> Polytope:
    """P_D = {m : <m, v_rho> >= -a_rho}; raises "empty polytope" when infeasible."""
    if not d.fan.complete:
        raise ValueError("fan must be complete")
    rows = [(vec(r), -a) for r, a in zip(d.fan.rays, d.coeffs)]
    return polytopes.from_halfspaces(rows, d.fan.dim)


def is_nef(d: ToricDivisor) -> bool:
    """psi_D concave: each cone's functional satisfies every ray inequality."""
    for cone in d.fan.cones:
        m = _cone_functional(d, cone)
        if m is None:
            return False
        for r, a in zip(d.fan.rays, d.coeffs):
            if dot(m, vec(r)) < -a:
                return False
    return True


def is_big(d: ToricDivisor) -> bool:
    try:
        p = polytope_of_divisor(d)
    except ValueError:
        return False
    return polytopes.affine_rank(list(p.vertices)) == d.fan.dim


def refine(fan: Fan, new_rays: Iterable[Sequence]) -> Fan:
    """Stellar subdivisions at the given rays, in order."""
    out = fan
    for r in new_rays:
        out = fans.stellar_refine(out, r)
    return out


def pullback(d: ToricDivisor, fine: Fan) -> ToricDivisor:
    """Incarnation of the divisor on a refinement: coefficients -psi_D at new rays."""
    return divisor(fine, [-psi_value(d, r) for r in fine.rays])


@dataclass(frozen=True)
class ToricMetric:
    """PL concave metric g = min_j(<m_j, v> + c_j) on the line bundle O(D)."""
    line: ToricDivisor
    pieces: tuple[Piece, ...]

    def g(self, v: Sequence) -> Fraction:
        """Recession value min_j <m_j, v>: the slope of the metric at infinity."""
        x = vec(v)
        return min(dot(m, x) for m, _ in self.pieces)

    def g_affine(self, v: Sequence) -> Fraction:
        x = vec(v)
        return min(dot(m, x) + c for m, c in self.pieces)

    def to_json(self) -> dict:
        return {
            "divisor": self.line.to_json(),
            "pieces": [{"slope": [fmt(x) for x in m], "offset": fmt(c)} for m, c in self.pieces],
        }


def metric(line: ToricDivisor, pieces: Iterable[tuple[Sequence, object]]) -> ToricMetric:
    norm: list[Piece] = sorted({(vec(m), rat(c)) for m, c in pieces})
    if not norm:
        raise ValueError("metric needs at least one piece")
    for m, _ in norm:
        for r, a in zip(line.fan.rays, line.coeffs):
            if dot(m, vec(r)) < -a:
                raise ValueError("negative Lelong number")
    return ToricMetric(line, tuple(norm))


def metric_from_json(fan: Fan, data: dict) -> ToricMetric:
    line = divisor(fan, data["divisor"]["coeffs"])
    pieces = [(tuple(rat(x) for x in p["slope"]), rat(p.get("offset", 0))) for p in data["pieces"]]
    return metric(line, pieces)


@lru_cache(maxsize=None)
def model_polytope(h: ToricMetric) -> Polytope:
    """P(g): the hull of the recession slopes."""
    return polytopes.canonicalize([m for m, _ in h.pieces])


def minimal_metric(d: ToricDivisor) -> ToricMetric:
    """g = support function of P_D (the concavification of psi_D); zero Lelong data."""
    p = polytope_of_divisor(d)
    return metric(d, [(v, 0) for v in p.vertices])


def metric_with_ray_weights(d: ToricDivisor, weights: Mapping) -> ToricMetric:
    """Metric with log singularity of weight w_rho along each listed ray divisor."""
    w = {}
    for key, val in weights.items():
        ray = tuple(int(x) for x in (key.split(",") if isinstance(key, str) else key))
        if d.fan.ray_index(ray) is None:
            raise ValueError("ray not in fan")
        w[ray] = rat(val)
    rows = []
    for r, a in zip(d.fan.rays, d.coeffs):
        rows.append((vec(r), -a + w.get(r, Fraction(0))))
    p = polytopes.from_halfspaces(rows, d.fan.dim)
    return metric(d, [(v, 0) for v in p.vertices])


def tensor(h1: ToricMetric, h2: ToricMetric) -> ToricMetric:
    """Product metric: divisors add, pieces add pairwise."""
    if h1.line.fan == h2.line.fan:
        line = divisor(h1.line.fan, [a + b for a, b in zip(h1.line.coeffs, h2.line.coeffs)])
    else:
        common = fans.common_refinement(h1.line.fan, h2.line.fan)
        line = divisor(common, [-psi_value(h1.line, r) - psi_value(h2.line, r) for r in common.rays])
    pieces = [(tuple(x + y for x, y in zip(m1, m2)), c1 + c2)
              for m1, c1 in h1.pieces for m2, c2 in h2.pieces]
    return metric(line, pieces)


@dataclass(frozen=True)
class HermitianToricLine:
    metric: ToricMetric
    label: str = ""

    @property
    def line(self) -> ToricDivisor:
        return self.metric.line


def hermitian(metric_: ToricMetric, label: str = "") -> HermitianToricLine:
    return HermitianToricLine(metric_, label)


def _as_metric(h) -> ToricMetric:
    return h.metric if isinstance(h, HermitianToricLine) else h


def lelong_numbers(h, fan: Fan) -> dict[IntVec, Fraction]:
    """nu_rho = g(v_rho) - psi_D(v_rho) per ray of the (refined) fan."""
    m = _as_metric(h)
    out: dict[IntVec, Fraction] = {}
    for r in fan.rays:
        nu = m.g(r) - psi_value(m.line, r)
        if nu < 0:
            raise ValueError("negative Lelong number")
        out[r] = nu
    return out


def singularity_divisor(h, fan: Fan) -> ToricDivisor:
    nus = lelong_numbers(h, fan)
    return divisor(fan, [nus[r] for r in fan.rays])


def np_mass(hs: Sequence[HermitianToricLine]) -> Fraction:
    """Non-pluripolar mass: n! times the mixed volume of the model polytopes."""
    if not hs:
        raise ValueError("wrong count of bodies")
    n = hs[0].line.fan.dim
    if any(h.line.fan.dim != n for h in hs):
        raise ValueError("dimension/fan mismatch")
    bodies = [model_polytope(h.metric) for h in hs]
    return math.factorial(n) * polytopes.mixed_volume(bodies)


def minimal_extension(h, fan: Fan) -> HermitianToricLine:
    """Twist killing all Lelong numbers on the given fan: a'_rho = -g(v_rho)."""
    m = _as_metric(h)
    line = divisor(fan, [-m.g(r) for r in fan.rays])
    return HermitianToricLine(metric(line, m.pieces), "minimal extension")


def volume_profile(h: HermitianToricLine, chain: Sequence[Fan]) -> list[Fraction]:
    """n!-normalized volumes of the minimal extension's divisor along a refinement chain."""
    for fine, coarse in zip(chain[1:], chain):
        if not fans.refines(fine, coarse):
            raise ValueError("chain not nested")
    n = h.line.fan.dim
    out = []
    for f in chain:
        d = minimal_extension(h.metric, f).line
        out.append(math.factorial(n) * polytopes.volume(polytope_of_divisor(d)))
    return out
