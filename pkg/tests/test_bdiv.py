"""Cartier/Weil b-divisors: order, sums, incarnations, intersections, volumes."""
import random
from fractions import Fraction

import pytest

from toricbdiv import bdiv, fans, polytopes, toric
from toricbdiv.rationals import fmt, rat
from toricbdiv.bdiv import (RatInterval, add, bdiv_of_metric, cartier,
                            cartier_from_json, incarnation,
                            incarnation_volumes, intersect_cartier,
                            intersect_nef, leq, numerically_equal, vol, weil,
                            zero_bdiv)

from conftest import (minimal_line, o_p1p1, o_p2, p1, p1xp1, p2,
                      rand_weighted, weighted_line)


def b_of(d: toric.ToricDivisor) -> bdiv.CartierB:
    return cartier(d.fan, [toric.psi_value(d, r) for r in d.fan.rays])


def o3_weighted():
    return bdiv_of_metric(weighted_line(o_p2(3), {(1, 0): 1}))


def shrinking_weil(limit_deg=2, steps=12):
    fan = p2()
    approx = [b_of(o_p2(limit_deg + Fraction(1, 2**k))) for k in range(steps)]
    return weil(approx, b_of(o_p2(limit_deg)))


# -- construction and incarnations --------------------------------------------

def test_cartier_basics():
    b = b_of(o_p2(2))
    assert b.nef
    assert b.divisor().to_json()["coeffs"] == {"-1,-1": "2", "0,1": "0", "1,0": "0"}
    assert b.polytope() == toric.polytope_of_divisor(o_p2(2))
    with pytest.raises(ValueError, match="value count mismatch"):
        cartier(p2(), [0, 0])


def test_cartier_json_round_trip():
    b = o3_weighted().cartier
    again = cartier_from_json(b.to_json())
    assert again == b


def test_bdiv_of_metric_refines_and_is_nef():
    h = toric.hermitian(toric.metric(o_p2(2), [((0, 0), 0), ((1, 1), 0)]))
    b = bdiv_of_metric(h).cartier
    assert b.nef
    assert (1, -1) in b.fan.rays and (-1, 1) in b.fan.rays
    # psi at every determination ray is the metric's own slope function
    for r in b.fan.rays:
        assert b.psi(r) == h.metric.g(r)


def test_incarnation_pushforward_compatible():
    h = toric.hermitian(toric.metric(o_p2(2), [((0, 0), 0), ((1, 1), 0)]))
    b = bdiv_of_metric(h).cartier
    assert len(b.fan.rays) == 5
    d_fine = incarnation(b, b.fan)
    d_coarse = incarnation(b, p2())
    cf = d_fine.to_json()["coeffs"]
    cc = d_coarse.to_json()["coeffs"]
    for key, val in cc.items():
        assert cf[key] == val
    # the added rays see the bend, the base fan does not
    assert toric.polytope_of_divisor(d_coarse) == toric.polytope_of_divisor(o_p2(2))


def test_minimal_metric_bdiv_recovers_line():
    for d in (o_p2(3), o_p1p1(1, 2)):
        b = bdiv_of_metric(minimal_line(d)).cartier
        assert incarnation(b, d.fan).to_json() == d.to_json()


def test_incarnation_is_line_minus_singularity():
    rng = random.Random(7)
    for _ in range(8):
        h = rand_weighted(rng, p2())
        b = bdiv_of_metric(h).cartier
        fan = b.fan
        line = toric.pullback(h.line, fan)
        sing = toric.singularity_divisor(h, fan)
        got = incarnation(b, fan).to_json()["coeffs"]
        lc = line.to_json()["coeffs"]
        sc = sing.to_json()["coeffs"]
        # a_rho(incarnation) = a_rho(line) - nu_rho
        assert got == {k: fmt(rat(lc[k]) - rat(sc[k])) for k in got}


# -- order ---------------------------------------------------------------------

def test_leq_reflexive_and_strict():
    b1, b2 = b_of(o_p2(1)), b_of(o_p2(2))
    assert leq(b1, b1)
    assert leq(b1, b2)
    assert not leq(b2, b1)


def test_leq_weighted_below_minimal():
    bw = o3_weighted().cartier
    bm = bdiv_of_metric(minimal_line(o_p2(3))).cartier
    assert leq(bw, bm)
    assert not leq(bm, bw)
    assert not numerically_equal(bw, bm)


def test_leq_incomparable_pair():
    b1 = b_of(o_p1p1(3, 1))
    b2 = b_of(o_p2(2))
    assert not leq(b1, b2)
    assert not leq(b2, b1)


def test_leq_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        leq(b_of(toric.divisor(p1(), [1, 0])), b_of(o_p2(1)))


def test_leq_invariant_under_linear_shift():
    b = b_of(o_p2(2))
    m = (1, -2)
    shifted = cartier(p2(), [v + m[0] * r[0] + m[1] * r[1]
                             for v, r in zip(b.values, b.fan.rays)])
    assert numerically_equal(b, shifted)
    assert b.polytope() == polytopes.translate(shifted.polytope(), [-1, 2])


# -- sums ----------------------------------------------------------------------

def test_add_zero_and_line_sum():
    b = b_of(o_p2(2))
    assert add(b, zero_bdiv(p2())) == b
    s = add(b_of(o_p2(1)), b_of(o_p2(2)))
    assert numerically_equal(s, b_of(o_p2(3)))
    assert s.polytope() == b_of(o_p2(3)).polytope()


def test_add_is_minkowski_on_polytopes():
    rng = random.Random(11)
    for _ in range(6):
        h1, h2 = rand_weighted(rng, p2()), rand_weighted(rng, p2())
        b1, b2 = bdiv_of_metric(h1).cartier, bdiv_of_metric(h2).cartier
        s = add(b1, b2)
        assert s.polytope() == polytopes.minkowski_sum(b1.polytope(), b2.polytope())
        assert s.polytope() == add(b2, b1).polytope()


def test_add_associative_on_polytopes():
    b1, b2, b3 = b_of(o_p2(1)), o3_weighted().cartier, zero_bdiv(p2())
    assert add(add(b1, b2), b3).polytope() == add(b1, add(b2, b3)).polytope()


# -- intersections --------------------------------------------------------------

def test_intersect_frozen():
    assert intersect_cartier([b_of(o_p2(1)), b_of(o_p2(2))]) == 2
    assert intersect_cartier([b_of(o_p1p1(1, 0)), b_of(o_p1p1(0, 1))]) == 1
    assert intersect_cartier([b_of(o_p1p1(1, 0))] * 2) == 0
    assert intersect_cartier([b_of(o_p2(3))] * 2) == 9
    assert intersect_cartier([o3_weighted().cartier] * 2) == 4
    assert intersect_cartier([zero_bdiv(p2())] * 2) == 0


def test_intersect_symmetric_and_monotone():
    rng = random.Random(13)
    for _ in range(5):
        bs = [bdiv_of_metric(rand_weighted(rng, p2())).cartier for _ in range(2)]
        assert intersect_cartier(bs) == intersect_cartier(bs[::-1])
    x = o3_weighted().cartier
    assert intersect_cartier([b_of(o_p2(1)), x]) <= intersect_cartier([b_of(o_p2(2)), x])


def test_intersect_errors():
    with pytest.raises(ValueError, match="wrong count of bodies"):
        intersect_cartier([])
    with pytest.raises(ValueError, match="wrong count of bodies"):
        intersect_cartier([b_of(o_p2(1))])
    with pytest.raises(ValueError, match="dimension mismatch"):
        intersect_cartier([b_of(o_p2(1)), b_of(toric.divisor(p1(), [1, 0]))])
    not_nef = cartier(p2(), [1, 0, 0])
    assert not not_nef.nef
    with pytest.raises(ValueError, match="intersection defined for nef inputs"):
        intersect_cartier([not_nef, b_of(o_p2(1))])


# -- Weil sequences --------------------------------------------------------------

def test_weil_validation():
    with pytest.raises(ValueError, match="empty approximant sequence"):
        weil([])
    with pytest.raises(ValueError, match="intersection defined for nef inputs"):
        weil([cartier(p2(), [1, 0, 0])])
    with pytest.raises(ValueError, match="approximants must be non-increasing"):
        weil([b_of(o_p2(1)), b_of(o_p2(2))])


def test_intersect_nef_single_cartier():
    out = intersect_nef([b_of(o_p2(3)), b_of(o_p2(3))], Fraction(1, 100))
    assert out == RatInterval(Fraction(9), Fraction(9), True)


def test_intersect_nef_with_limit_certifies():
    w = shrinking_weil()
    out = intersect_nef([w, w], Fraction(1, 100))
    assert out.certified
    assert out.lo == 4
    assert 4 <= out.hi <= 5
    assert out.width() < Fraction(1, 2)


def test_intersect_nef_without_limit():
    approx = [b_of(o_p2(2 + Fraction(1, 2**k))) for k in range(12)]
    w = weil(approx)
    out = intersect_nef([w, w], Fraction(1, 100))
    assert not out.certified
    assert out.hi >= 4


def test_intersect_nef_budget_error():
    w = weil([b_of(o_p2(4)), b_of(o_p2(3)), b_of(o_p2(2))])
    with pytest.raises(ValueError, match="tolerance not reached in budget"):
        intersect_nef([w, w], Fraction(1, 10**9))


def test_intersect_nef_diagonal_monotone():
    w = shrinking_weil(steps=6)
    vals = [intersect_cartier([a, a]) for a in w.approximants]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
    assert all(v >= 4 for v in vals)


def test_intersect_nef_mixed_weil_and_cartier():
    out = intersect_nef([shrinking_weil(steps=25), b_of(o_p2(1))], Fraction(1, 1000))
    assert out.certified
    assert out.lo == 2


# -- volumes ----------------------------------------------------------------------

def test_vol_cartier():
    assert vol(b_of(o_p2(3))) == 9
    assert vol(o3_weighted().cartier) == 4
    assert vol(zero_bdiv(p2())) == 0


def test_vol_weil_interval():
    out = vol(shrinking_weil(steps=25))
    assert isinstance(out, RatInterval)
    assert out.certified
    assert out.lo == 4
    assert out.width() < Fraction(1, 10**5)


def test_vol_equals_model_polytope_volume():
    rng = random.Random(17)
    for _ in range(8):
        h = rand_weighted(rng, p2())
        b = bdiv_of_metric(h).cartier
        assert vol(b) == 2 * polytopes.volume(toric.model_polytope(h.metric))


def test_vol_tensor_bilinearity():
    rng = random.Random(19)
    for _ in range(5):
        h1, h2 = rand_weighted(rng, p2()), rand_weighted(rng, p2())
        b1, b2 = bdiv_of_metric(h1).cartier, bdiv_of_metric(h2).cartier
        b12 = bdiv_of_metric(toric.hermitian(toric.tensor(h1.metric, h2.metric))).cartier
        assert vol(b12) == vol(b1) + 2 * intersect_cartier([b1, b2]) + vol(b2)


def test_incarnation_volumes_profile():
    h = toric.hermitian(toric.metric(o_p2(2), [((0, 0), 0), ((1, 1), 0)]))
    b = bdiv_of_metric(h).cartier
    out = incarnation_volumes(b, [p2(), b.fan])
    assert out == [4, 0]
    with pytest.raises(ValueError, match="chain not nested"):
        incarnation_volumes(b, [b.fan, p2()])


# -- mass comparison ---------------------------------------------------------------

def test_chern_weil_line_frozen():
    h = weighted_line(o_p2(3), {(1, 0): 1})
    rep = bdiv.chern_weil_line([h, h])
    assert (rep.lhs, rep.rhs, rep.mid, rep.verdict) == (4, 4, 4, "equal")
    assert rep.to_json() == {"lhs": "4", "mid": "4", "rhs": "4", "verdict": "equal"}


def test_chern_weil_line_minimal_is_classical():
    rep = bdiv.chern_weil_line([minimal_line(o_p1p1(1, 0)), minimal_line(o_p1p1(0, 1))])
    assert rep.verdict == "equal"
    assert rep.lhs == 1
    assert rep.mid is None


def test_chern_weil_line_random():
    rng = random.Random(23)
    for fan in (p2(), p1xp1()):
        for _ in range(5):
            h = rand_weighted(rng, fan)
            rep = bdiv.chern_weil_line([h, h])
            assert rep.verdict == "equal"
            assert rep.lhs == rep.rhs == rep.mid
