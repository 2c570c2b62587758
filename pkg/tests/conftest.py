"""Shared builders for the test suite."""
from __future__ import annotations

from fractions import Fraction

from toricbdiv import fans, toric


def p2() -> fans.Fan:
    return fans.projective_space_fan(2)


def p1() -> fans.Fan:
    return fans.projective_space_fan(1)


def p1xp1() -> fans.Fan:
    return fans.product_fan(p1(), p1())


def p1cubed() -> fans.Fan:
    return fans.product_fan(p1xp1(), p1())


def o_p2(d) -> toric.ToricDivisor:
    """O(d) on the projective plane: d times the divisor of the ray (-1,-1)."""
    return toric.divisor(p2(), {(1, 0): 0, (0, 1): 0, (-1, -1): d})


def o_p1p1(a, b) -> toric.ToricDivisor:
    return toric.divisor(p1xp1(), {(1, 0): 0, (0, 1): 0, (-1, 0): a, (0, -1): b})


def minimal_line(d: toric.ToricDivisor, label: str = "") -> toric.HermitianToricLine:
    return toric.hermitian(toric.minimal_metric(d), label)


def weighted_line(d: toric.ToricDivisor, weights) -> toric.HermitianToricLine:
    return toric.hermitian(toric.metric_with_ray_weights(d, weights))


def rand_weighted(rng, fan: fans.Fan, max_deg: int = 4) -> toric.HermitianToricLine:
    """Random nef+big line with small rational weights along one or two rays."""
    if fan.dim != 2:
        raise ValueError("2d helper")
    if len(fan.rays) == 3:
        deg = rng.randint(1, max_deg)
        d = toric.divisor(fan, {(1, 0): 0, (0, 1): 0, (-1, -1): deg})
    else:
        a, b = rng.randint(1, max_deg), rng.randint(1, max_deg)
        d = toric.divisor(fan, {(1, 0): 0, (0, 1): 0, (-1, 0): a, (0, -1): b})
    rays = list(fan.rays)
    weights = {}
    for ray in rng.sample(rays, rng.randint(0, 2)):
        # weight < half the polytope's extent along the ray keeps the model big
        margin = _extent(d, ray)
        if margin > 0:
            num = rng.randint(0, 2)
            den = rng.choice([2, 3, 4])
            w = min(Fraction(num, den), margin / 2 - Fraction(1, 8))
            if w > 0:
                weights[ray] = w
    return weighted_line(d, weights) if weights else minimal_line(d)


def _extent(d: toric.ToricDivisor, ray) -> Fraction:
    from toricbdiv.rationals import dot, vec
    p = toric.polytope_of_divisor(d)
    vals = [dot(vec(ray), v) for v in p.vertices]
    return max(vals) - min(vals)
