"""Rational polyhedral fans: membership, completeness, stellar and common refinement."""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import dd, lp
from .linalg import det, rank, solve
from .rationals import IntVec, Vec, dot, primitive, vec

Cone = tuple[int, ...]


@dataclass(frozen=True)
class Fan:
    """Fan given by primitive ray generators and maximal cones (ray index tuples)."""
    dim: int
    rays: tuple[IntVec, ...]
    cones: tuple[Cone, ...]
    complete: bool = False
    smooth: bool = False

    def ray_index(self, v: Sequence) -> int | None:
        p = primitive(vec(v))
        try:
            return self.rays.index(p)
        except ValueError:
            return None

    def cone_rays(self, cone: Cone) -> list[IntVec]:
        return [self.rays[i] for i in cone]

    def is_simplicial_cone(self, cone: Cone) -> bool:
        return len(cone) == self.dim and rank([list(map(Fraction, self.rays[i])) for i in cone]) == self.dim

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.rays], "cones": [list(c) for c in self.cones]}

    def __str__(self) -> str:
        return f"Fan(dim={self.dim}, rays={len(self.rays)}, maximal_cones={len(self.cones)})"


def make_fan(rays: Iterable[Sequence], cones: Iterable[Iterable[int]], dim: int | None = None) -> Fan:
    """Normalize rays to primitive vectors, dedupe, sort, and remap cone indices."""
    prim = [primitive(vec(r)) for r in rays]
    if not prim:
        raise ValueError("empty fan")
    n = dim if dim is not None else len(prim[0])
    if any(len(r) != n for r in prim):
        raise ValueError("dimension mismatch")
    uniq = sorted(set(prim))
    remap = {r: i for i, r in enumerate(uniq)}
    new_cones = sorted({tuple(sorted({remap[prim[i]] for i in c})) for c in cones})
    base = Fan(n, tuple(uniq), tuple(new_cones))
    return Fan(n, base.rays, base.cones, is_complete(base), is_smooth(base))


def fan_from_json(data: dict) -> Fan:
    return make_fan(data["rays"], data["cones"])


def cone_contains(fan: Fan, cone: Cone, v: Sequence) -> bool:
    """Exact membership of v in the cone spanned by the listed rays."""
    x = vec(v)
    gens = fan.cone_rays(cone)
    if fan.is_simplicial_cone(cone):
        cols = [[Fraction(g[i]) for g in gens] for i in range(fan.dim)]
        lam = solve(cols, x)
        if lam is None:
            return False
        # simplicial full-rank solve is unique; verify and sign-check
        for i in range(fan.dim):
            if sum(Fraction(g[i]) * l for g, l in zip(gens, lam)) != x[i]:
                return False
        return all(l >= 0 for l in lam)
    k = len(gens)
    a_eq = [[Fraction(g[i]) for g in gens] for i in range(fan.dim)]
    b_eq = list(x)
    a_ub = []
    b_ub = []
    for j in range(k):
        row = [Fraction(0)] * k
        row[j] = Fraction(-1)
        a_ub.append(row)
        b_ub.append(Fraction(0))
    return lp.feasible(a_ub, b_ub, a_eq, b_eq)


def find_cone(fan: Fan, v: Sequence) -> Cone | None:
    for c in fan.cones:
        if cone_contains(fan, c, v):
            return c
    return None


def _dual_description(rays: list[IntVec], dim: int) -> tuple[list[Vec], list[IntVec]]:
    """Lineality basis and extreme rays of the dual cone {y : <y, r> >= 0}."""
    rows = [tuple(Fraction(x) for x in r) for r in rays]
    lin, extr = dd.extreme_rays(rows, dim)
    return lin, extr


def cone_halfspaces(fan: Fan, cone: Cone) -> list[Vec]:
    """Rows a with cone = {x : <a, x> >= 0 for all rows}."""
    lin, extr = _dual_description(fan.cone_rays(cone), fan.dim)
    rows: list[Vec] = [tuple(Fraction(x) for x in r) for r in extr]
    for l in lin:
        rows.append(l)
        rows.append(tuple(-x for x in l))
    return rows


def _cone_facet_keys(fan: Fan, cone: Cone) -> list[frozenset[int]]:
    """Each facet of a full-dimensional cone as the frozenset of rays lying on it."""
    _, normals = _dual_description(fan.cone_rays(cone), fan.dim)
    keys = []
    for a in normals:
        tight = frozenset(i for i in cone if dot(vec(a), vec(fan.rays[i])) == 0)
        keys.append(tight)
    return keys


def is_complete(fan: Fan) -> bool:
    """Walls of full-dimensional cones must each be shared by exactly two cones."""
    if not fan.cones:
        return False
    counts: dict[frozenset[int], int] = {}
    for cone in fan.cones:
        gens = [list(map(Fraction, r)) for r in fan.cone_rays(cone)]
        if rank(gens) < fan.dim:
            return False
        for key in _cone_facet_keys(fan, cone):
            counts[key] = counts.get(key, 0) + 1
    return all(c == 2 for c in counts.values())


def is_smooth(fan: Fan) -> bool:
    for cone in fan.cones:
        if len(cone) != fan.dim:
            return False
        d = det([list(map(Fraction, fan.rays[i])) for i in cone])
        if abs(d) != 1:
            return False
    return True


def stellar_refine(fan: Fan, w: Sequence) -> Fan:
    """Star subdivision at a ray; identity if the ray already belongs to the fan."""
    wp = primitive(vec(w))
    if wp in fan.rays:
        return fan
    hit = [c for c in fan.cones if cone_contains(fan, c, wp)]
    if not hit:
        raise ValueError("ray not in support")
    new_cones: list[tuple[IntVec, ...]] = []
    for cone in fan.cones:
        if cone not in hit:
            new_cones.append(tuple(fan.rays[i] for i in cone))
            continue
        _, normals = _dual_description(fan.cone_rays(cone), fan.dim)
        for a in normals:
            av = vec(a)
            if dot(av, vec(wp)) == 0:
                continue
            facet = tuple(fan.rays[i] for i in cone if dot(av, vec(fan.rays[i])) == 0)
            new_cones.append(facet + (wp,))
    all_rays = list(fan.rays) + [wp]
    idx = {r: i for i, r in enumerate(all_rays)}
    return make_fan(all_rays, [tuple(idx[r] for r in c) for c in new_cones], fan.dim)


def _intersect_full_dim(h1: list[Vec], h2: list[Vec], dim: int) -> list[IntVec] | None:
    lin, rays = dd.extreme_rays(h1 + h2, dim)
    if lin:
        return None
    if rank([list(r) for r in rays]) < dim:
        return None
    return rays


def common_refinement(f1: Fan, f2: Fan) -> Fan:
    """Fan whose cones are the full-dimensional intersections of cones from both fans."""
    if f1.dim != f2.dim:
        raise ValueError("dimension mismatch")
    h1 = {c: cone_halfspaces(f1, c) for c in f1.cones}
    h2 = {c: cone_halfspaces(f2, c) for c in f2.cones}
    cones_rays: list[list[IntVec]] = []
    for c1 in f1.cones:
        for c2 in f2.cones:
            rays = _intersect_full_dim(h1[c1], h2[c2], f1.dim)
            if rays is not None:
                cones_rays.append(rays)
    return _fan_from_cone_rays(cones_rays, f1.dim)


def _fan_from_cone_rays(cones_rays: list[list[IntVec]], dim: int) -> Fan:
    all_rays = sorted({r for rays in cones_rays for r in rays})
    idx = {r: i for i, r in enumerate(all_rays)}
    cones = sorted({tuple(sorted(idx[r] for r in rays)) for rays in cones_rays})
    base = Fan(dim, tuple(all_rays), tuple(cones))
    return Fan(dim, base.rays, base.cones, is_complete(base), is_smooth(base))


def refines(fine: Fan, coarse: Fan) -> bool:
    """True when every maximal cone of `fine` lies inside some cone of `coarse`."""
    if fine.dim != coarse.dim:
        return False
    for cone in fine.cones:
        gens = fine.cone_rays(cone)
        if not any(all(cone_contains(coarse, c, g) for g in gens) for c in coarse.cones):
            return False
    return True


def refine_by_slopes(fan: Fan, slopes: Sequence[Vec]) -> Fan:
    """Refine so each cone lies in one region of linearity of min_k <slope_k, v>."""
    pts = list(dict.fromkeys(slopes))
    if len(pts) == 1:
        return fan
    hs = {c: cone_halfspaces(fan, c) for c in fan.cones}
    cones_rays: list[list[IntVec]] = []
    for k, m in enumerate(pts):
        region = [tuple(mj - mi for mj, mi in zip(other, m)) for other in pts if other != m]
        for c in fan.cones:
            rays = _intersect_full_dim(hs[c], region, fan.dim)
            if rays is not None:
                cones_rays.append(rays)
    return _fan_from_cone_rays(cones_rays, fan.dim)


def projective_space_fan(n: int) -> Fan:
    rays = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    cones = [tuple(sorted(set(range(n + 1)) - {i})) for i in range(n + 1)]
    return make_fan(rays, cones, n)


def product_fan(f1: Fan, f2: Fan) -> Fan:
    n1, n2 = f1.dim, f2.dim
    rays = [r + tuple(0 for _ in range(n2)) for r in f1.rays]
    rays += [tuple(0 for _ in range(n1)) + r for r in f2.rays]
    cones = []
    for c1 in f1.cones:
        for c2 in f2.cones:
            cones.append(tuple(c1) + tuple(len(f1.rays) + i for i in c2))
    return make_fan(rays, cones, n1 + n2)


def sort_rays_ccw(rays: Sequence[IntVec]) -> list[IntVec]:
    """Counterclockwise angular order of 2-d rays, starting at the positive x-axis."""
    def half(r: IntVec) -> int:
        if r[1] > 0 or (r[1] == 0 and r[0] > 0):
            return 0
        return 1

    def cmp(a: IntVec, b: IntVec) -> int:
        ha, hb = half(a), half(b)
        if ha != hb:
            return -1 if ha < hb else 1
        cr = a[0] * b[1] - a[1] * b[0]
        if cr > 0:
            return -1
        if cr < 0:
            return 1
        return 0

    return sorted(rays, key=functools.cmp_to_key(cmp))


def complete_fan_2d(rays: Iterable[Sequence]) -> Fan:
    """Complete 2-d fan whose maximal cones are consecutive pairs of the given rays."""
    prim = sorted({primitive(vec(r)) for r in rays})
    if len(prim) < 3:
        raise ValueError("need at least three rays")
    ordered = sort_rays_ccw(list(prim))
    idx = {r: i for i, r in enumerate(prim)}
    cones = []
    for i, r in enumerate(ordered):
        s = ordered[(i + 1) % len(ordered)]
        if r[0] * s[1] - r[1] * s[0] <= 0:
            raise ValueError("rays do not span the plane positively")
        cones.append((idx[r], idx[s]))
    return make_fan(prim, cones, 2)
