"""Flag valuations, Okounkov bodies, section hulls, translation identity."""
import random
from fractions import Fraction

import pytest

from toricbdiv import bdiv, fans, polytopes, toric
from toricbdiv.okounkov import (flag, monotone_containment, nu_of_metric,
                                okounkov_of_bdiv, okounkov_of_bundle,
                                okounkov_of_class, partial_okounkov,
                                verify_okouniden)
from toricbdiv.chern import split_bundle

from conftest import (minimal_line, o_p1p1, o_p2, p1, p1xp1, p2,
                      rand_weighted, weighted_line)


def std_flag():
    return flag([(1, 0), (0, 1)])


def hull(pts):
    return polytopes.canonicalize([tuple(Fraction(x) for x in p) for p in pts])


def contains_origin(p):
    return all(c <= 0 for _, c in p.halfspaces)


def op1(d):
    return toric.divisor(p1(), {(-1,): d, (1,): 0})


# -- flags ---------------------------------------------------------------------

def test_flag_validation():
    with pytest.raises(ValueError, match="dimension mismatch"):
        flag([(1, 0)])
    with pytest.raises(ValueError, match="flag cone must be smooth"):
        flag([(1, 0), (1, 2)])
    with pytest.raises(ValueError, match="order matrix must be unimodular"):
        flag([(1, 0), (0, 1)], order=[[1, 0], [0, 2]])


def test_flag_coords_and_order():
    nu = flag([(1, 0), (0, 1)], order=[[0, 1], [1, 0]])
    assert nu.coords((2, 5)) == (5, 2)
    body = okounkov_of_class(o_p1p1(1, 2), nu).body
    assert body == hull([(0, 0), (2, 0), (0, 1), (2, 1)])


# -- class bodies -----------------------------------------------------------------

def test_class_body_frozen():
    out = okounkov_of_class(o_p2(3), std_flag())
    assert out.body == hull([(0, 0), (3, 0), (0, 3)])
    assert out.provenance == "class"
    assert out.shift is None
    assert out.volume() == Fraction(9, 2)
    assert okounkov_of_class(o_p1p1(1, 1), std_flag()).body == \
        hull([(0, 0), (1, 0), (0, 1), (1, 1)])


def test_class_body_cornered_flag():
    nu = flag([(0, 1), (-1, -1)])
    out = okounkov_of_class(o_p2(3), nu)
    assert out.body == hull([(0, 0), (3, 0), (0, 3)])
    assert contains_origin(out.body)


def test_class_body_rejects():
    with pytest.raises(ValueError, match="not nef or not big"):
        okounkov_of_class(o_p1p1(1, 0), std_flag())
    with pytest.raises(ValueError, match="not nef or not big"):
        okounkov_of_class(toric.divisor(p2(), {(-1, -1): -1}), std_flag())


# -- partial bodies ----------------------------------------------------------------

def test_partial_minimal_recovers_class():
    hulls, limit = partial_okounkov(minimal_line(o_p2(3)), std_flag(), k_max=6)
    want = hull([(0, 0), (3, 0), (0, 3)])
    assert all(h == want for h in hulls)
    assert limit.body == want
    assert limit.provenance == "partial_Gk"
    assert limit.shift == (0, 0)


def test_partial_weighted():
    h = weighted_line(o_p2(3), {(1, 0): 1})
    hulls, limit = partial_okounkov(h, std_flag(), k_max=8)
    model = hull([(1, 0), (3, 0), (1, 2)])
    assert limit.body == model
    assert limit.shift == (1, 0)
    for k, hk in enumerate(hulls, start=1):
        # hulls grow inside the model polytope and hit it at k = 1 already here
        assert polytopes.translate_into(hk, model) == (0, 0)
    assert hulls[0] == model
    assert 2 * limit.volume() == bdiv.vol(bdiv.bdiv_of_metric(h).cartier)


def test_partial_k_validation():
    with pytest.raises(ValueError, match="k must be positive"):
        partial_okounkov(minimal_line(o_p2(1)), std_flag(), k_max=0)


def test_partial_empty_sections():
    t0 = (Fraction(3, 7), Fraction(3, 7))
    pieces = [(t0, 0),
              ((t0[0] + Fraction(1, 9), t0[1]), 0),
              ((t0[0], t0[1] + Fraction(1, 9)), 0)]
    h = toric.hermitian(toric.metric(o_p2(1), pieces))
    with pytest.raises(ValueError, match="empty section space at all k <= k_max"):
        partial_okounkov(h, std_flag(), k_max=3)


# -- b-divisor bodies ----------------------------------------------------------------

def b_of(d):
    return bdiv.cartier(d.fan, [toric.psi_value(d, r) for r in d.fan.rays])


def test_bdiv_body_cartier():
    out = okounkov_of_bdiv(b_of(o_p2(3)), std_flag())
    assert out.body == hull([(0, 0), (3, 0), (0, 3)])
    assert out.provenance == "bdiv_limit"
    assert 2 * out.volume() == bdiv.vol(b_of(o_p2(3)))


def test_bdiv_body_weil_limit():
    approx = [b_of(o_p2(2 + Fraction(1, 2**k))) for k in range(6)]
    w = bdiv.weil(approx, b_of(o_p2(2)))
    out = okounkov_of_bdiv(w, std_flag())
    assert out.body == hull([(0, 0), (2, 0), (0, 2)])


def test_bdiv_body_without_limit_stops_by_tol():
    approx = [b_of(o_p2(2 + Fraction(1, 4**k))) for k in range(8)]
    w = bdiv.weil(approx)
    out = okounkov_of_bdiv(w, std_flag(), tol=Fraction(1, 100))
    lim = hull([(0, 0), (2, 0), (0, 2)])
    assert polytopes.translate_into(lim, out.body) == (0, 0)
    assert polytopes.hausdorff_linf(lim, out.body).value < Fraction(1, 100)


def test_bdiv_body_tolerance_error():
    w = bdiv.weil([b_of(o_p2(3)), b_of(o_p2(2))])
    with pytest.raises(ValueError, match="tolerance not reached"):
        okounkov_of_bdiv(w, std_flag(), tol=Fraction(1, 10**9))


def test_bdiv_body_contains_origin():
    rng = random.Random(43)
    for _ in range(6):
        h = rand_weighted(rng, p2())
        out = okounkov_of_bdiv(bdiv.bdiv_of_metric(h).cartier, std_flag())
        assert contains_origin(out.body)


# -- translation identity ---------------------------------------------------------------

def test_okouniden_minimal():
    rep = verify_okouniden(minimal_line(o_p2(2)), std_flag())
    assert rep.verdict == "equal"
    assert rep.shift == (0, 0)
    assert rep.lhs.body == rep.rhs.body


def test_okouniden_weighted():
    rep = verify_okouniden(weighted_line(o_p2(3), {(1, 0): 1}), std_flag())
    assert rep.verdict == "equal"
    assert rep.shift == (1, 0)
    assert rep.lhs.body == hull([(0, 0), (2, 0), (0, 2)])
    assert rep.rhs.body == hull([(1, 0), (3, 0), (1, 2)])


def test_okouniden_two_ray_weights():
    h = weighted_line(o_p2(4), {(1, 0): 1, (0, 1): 2})
    rep = verify_okouniden(h, std_flag())
    assert rep.verdict == "equal"
    assert rep.shift == (1, 2)


def test_okouniden_bent_pieces():
    pieces = [((1, 0), 0), ((0, 2), 0), ((2, 2), 0), ((3, 0), 0)]
    h = toric.hermitian(toric.metric(o_p2(5), pieces))
    rep = verify_okouniden(h, std_flag())
    assert rep.verdict == "equal"
    assert polytopes.translate(rep.lhs.body, rep.shift) == rep.rhs.body


def test_okouniden_random():
    rng = random.Random(47)
    for fan in (p2(), p1xp1()):
        for _ in range(5):
            rep = verify_okouniden(rand_weighted(rng, fan), std_flag())
            assert rep.verdict == "equal"


def test_nu_of_metric_slope_convergence():
    # decreasing metrics: per-ray singularities converge to the limit metric's
    ray = (-1, -1)
    limit = toric.hermitian(toric.metric(o_p2(2), [((0, 0), 0), ((1, 1), 0)]))
    fan = bdiv.bdiv_of_metric(limit).cartier.fan
    nu_lim = toric.lelong_numbers(limit, fan)[ray]
    prev = None
    for k in (1, 2, 4, 8, 16):
        t = 1 - Fraction(1, k)
        hk = toric.hermitian(toric.metric(o_p2(2), [((0, 0), 0), ((t, t), 0)]))
        nu_k = toric.lelong_numbers(hk, fan)[ray]
        if prev is not None:
            assert nu_k <= prev
        prev = nu_k
        assert nu_k >= nu_lim
        assert nu_k - nu_lim == Fraction(2, k)


# -- containment certificates -------------------------------------------------------------

def test_containment_line_sum():
    cert = monotone_containment(o_p2(1), o_p2(3), std_flag())
    assert cert.holds
    assert all(slack >= 0 for _, _, slack in cert.margins)
    assert any(slack == 0 for _, _, slack in cert.margins)


def test_containment_degenerate_equal():
    cert = monotone_containment(o_p2(2), o_p2(2), std_flag())
    assert cert.holds


def test_containment_rulings():
    cert = monotone_containment(o_p1p1(1, 0), o_p1p1(1, 1), std_flag())
    assert cert.holds


def test_containment_rejects():
    with pytest.raises(ValueError, match="dimension/fan mismatch"):
        monotone_containment(o_p2(1), o_p1p1(1, 1), std_flag())
    with pytest.raises(ValueError, match="hypothesis violated"):
        monotone_containment(toric.divisor(p2(), {(-1, -1): -1}), o_p2(1), std_flag())
    with pytest.raises(ValueError, match="hypothesis violated"):
        monotone_containment(o_p2(2), o_p2(1), std_flag())


# -- bundle bodies ------------------------------------------------------------------------

def test_okounkov_of_bundle_hirzebruch():
    bundle = split_bundle([minimal_line(op1(0)), minimal_line(op1(1))])
    hulls, limit = okounkov_of_bundle(bundle, std_flag(), k_max=5)
    assert limit.body == hull([(0, 0), (0, 1), (1, 1)])
    assert limit.volume() == Fraction(1, 2)
    assert hulls[-1] == limit.body
