"""Segre/Chern universal polynomials, twists, projectivizations, evaluation."""
import random
from fractions import Fraction

import pytest

from toricbdiv import chern, fans, toric
from toricbdiv.chern import (BundleDecl, chern_from_segre, chern_number,
                             constant, eval_segre_monomial, one,
                             parse_chern_expr, projectivize_split,
                             segre_from_chern, split_bundle, symbol,
                             twist_segre, zero)

from conftest import minimal_line, o_p1p1, o_p2, p1, p2, weighted_line


def s(i, b="E"):
    return symbol("s", b, i)


def c(i, b="E"):
    return symbol("c", b, i)


def numeric(elem, table):
    """Evaluate a graded element with a {(kind, bundle, i): Fraction} table."""
    out = elem.substitute(lambda sym: constant(table[sym]))
    assert not out.terms or out.terms[0][0] == ()
    return out.coeff(())


def series_inverse(coeffs, deg):
    """Inverse power series of 1 + coeffs[1] t + ... truncated at deg."""
    inv = [Fraction(1)]
    for m in range(1, deg + 1):
        inv.append(-sum(coeffs[j] * inv[m - j]
                        for j in range(1, m + 1) if j < len(coeffs)))
    return inv


def elementary(roots, deg):
    """Coefficients of prod (1 + r t) up to degree deg."""
    out = [Fraction(1)] + [Fraction(0)] * deg
    for r in roots:
        for j in range(deg, 0, -1):
            out[j] += out[j - 1] * r
    return out


def line(coeff_map, fan=None):
    return minimal_line(toric.divisor(fan or p2(), coeff_map))


def op1(d):
    return toric.divisor(p1(), {(-1,): d, (1,): 0})


# -- universal polynomials -----------------------------------------------------

def test_universal_frozen():
    assert chern_from_segre(0) == one()
    assert chern_from_segre(1) == zero() - s(1)
    assert chern_from_segre(2) == s(1) * s(1) - s(2)
    assert segre_from_chern(2) == c(1) * c(1) - c(2)
    assert chern_from_segre(-1) == zero()


def test_universal_matches_series_inversion():
    rng = random.Random(31)
    for _ in range(4):
        deg = 10
        svals = [Fraction(1)] + [Fraction(rng.randint(-6, 6), rng.randint(1, 4))
                                 for _ in range(deg)]
        cvals = series_inverse(svals, deg)
        table = {("s", "E", i): svals[i] for i in range(1, deg + 1)}
        for m in range(deg + 1):
            assert numeric(chern_from_segre(m), table) == cvals[m]


def test_universal_round_trip():
    for m in range(1, 9):
        assert segre_from_chern(m).to_segre() == s(m)


# -- twists ----------------------------------------------------------------------

def test_twist_frozen():
    e1 = BundleDecl("E", 1)
    assert twist_segre(e1, "L", 0) == one()
    assert twist_segre(e1, "L", 1) == s(1) - c(1, "L")
    e2 = BundleDecl("E", 2)
    assert twist_segre(e2, "L", 1) == s(1) - c(1, "L").scale(2)
    assert twist_segre(e2, "L", -1) == zero()


def test_twist_by_trivial_line_is_identity():
    for rank in (1, 2, 3):
        for a in range(5):
            out = twist_segre(BundleDecl("E", rank), "L", a).substitute(
                lambda sym: constant(Fraction(0)) if sym == ("c", "L", 1) else None)
            assert out == (s(a) if a else one())


def test_twist_matches_split_roots():
    rng = random.Random(37)
    deg = 4
    for rank in (1, 2, 3, 4):
        for _ in range(4):
            roots = [Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                     for _ in range(rank)]
            y = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            se = series_inverse(elementary(roots, deg), deg)
            st = series_inverse(elementary([r + y for r in roots], deg), deg)
            table = {("s", "E", i): se[i] for i in range(1, deg + 1)}
            table[("c", "L", 1)] = y
            for a in range(deg + 1):
                got = numeric(twist_segre(BundleDecl("E", rank), "L", a), table)
                assert got == st[a], (rank, a)


# -- projectivizations -----------------------------------------------------------

def test_projectivize_trivial_rank_two():
    b = split_bundle([minimal_line(op1(0)), minimal_line(op1(0))])
    fan, o1 = projectivize_split(b)
    assert fan == fans.product_fan(p1(), p1())
    want = {"-1,0": "0", "0,-1": "1", "0,1": "0", "1,0": "0"}
    assert o1.line.to_json()["coeffs"] == want


def test_projectivize_hirzebruch():
    b = split_bundle([minimal_line(op1(0)), minimal_line(op1(1))])
    fan, o1 = projectivize_split(b)
    assert fan.rays == ((-1, 1), (0, -1), (0, 1), (1, 0))
    assert toric.is_nef(o1.line)


def test_projectivize_rank_one_is_identity():
    h = minimal_line(o_p2(2))
    fan, o1 = projectivize_split(split_bundle([h]))
    assert fan == p2()
    assert o1 is h


def test_split_bundle_errors():
    with pytest.raises(ValueError, match="bundle needs at least one summand"):
        split_bundle([])
    with pytest.raises(ValueError, match="dimension/fan mismatch"):
        split_bundle([minimal_line(op1(1)), minimal_line(o_p2(1))])
    frac = minimal_line(toric.divisor(p2(), {(-1, -1): Fraction(3, 2)}))
    with pytest.raises(ValueError, match="summand coefficients must be integral"):
        projectivize_split(split_bundle([frac, minimal_line(o_p2(0))]))


# -- numeric evaluation -----------------------------------------------------------

def test_eval_frozen_surface():
    e = split_bundle([minimal_line(o_p2(1)), minimal_line(o_p2(1))])
    assert eval_segre_monomial([e], [2]) == 3
    o1 = split_bundle([minimal_line(o_p2(1))])
    assert eval_segre_monomial([o1], [2]) == 1
    assert eval_segre_monomial([o1, e], [0, 2]) == 3


def test_eval_curve_s1():
    for a in range(3):
        for b in range(3):
            e = split_bundle([minimal_line(op1(a)), minimal_line(op1(b))])
            assert eval_segre_monomial([e], [1]) == -(a + b)


def test_eval_negative_and_errors():
    e = split_bundle([minimal_line(o_p2(1))])
    assert eval_segre_monomial([e, e], [-1, 3]) == 0
    with pytest.raises(ValueError, match="exponent-sum mismatch"):
        eval_segre_monomial([e], [1])
    with pytest.raises(ValueError, match="exponent-sum mismatch"):
        eval_segre_monomial([e], [2, 0])
    with pytest.raises(ValueError, match="wrong count of bodies"):
        eval_segre_monomial([], [])
    f = split_bundle([minimal_line(op1(1))])
    with pytest.raises(ValueError, match="dimension/fan mismatch"):
        eval_segre_monomial([e, f], [1, 1])


def test_eval_commutes():
    e = split_bundle([minimal_line(o_p2(1)), minimal_line(o_p2(2))])
    f = split_bundle([minimal_line(o_p2(1))])
    assert eval_segre_monomial([e, f], [1, 1]) == eval_segre_monomial([f, e], [1, 1])
    g = split_bundle([minimal_line(op1(1)), minimal_line(op1(2))])
    h = split_bundle([minimal_line(op1(0)), minimal_line(op1(3))])
    assert eval_segre_monomial([g, h], [1, 0]) == eval_segre_monomial([h, g], [0, 1])


def test_eval_singular_summand_full_mass():
    h = weighted_line(o_p2(3), {(1, 0): 1})
    l = split_bundle([h])
    # (-1)^n s_n of a line is c_1^n, the non-pluripolar mass
    assert eval_segre_monomial([l], [2]) == 4
    assert toric.np_mass([h, h]) == 4


def test_chern_number_frozen():
    table = {"E": split_bundle([minimal_line(o_p2(1)), minimal_line(o_p2(1))]),
             "L": split_bundle([minimal_line(o_p2(2))])}
    assert chern_number(table, "c2(E)") == 1
    assert chern_number(table, "c1(E)^2") == 4
    assert chern_number(table, "c1(L)*c1(L)") == 4
    assert chern_number(table, "c2(L)") == 0
    assert chern_number(table, "c1(E)^2 - c2(E)") == 3
    assert chern_number(table, "3/2*c2(E) - s2(L)") == Fraction(-5, 2)
    with pytest.raises(ValueError, match="unknown bundle"):
        chern_number(table, "c2(F)")


# -- parser -------------------------------------------------------------------------

def test_parse_shapes():
    assert parse_chern_expr("c1(E)*c1(E) - 2*s2(E)") == \
        c(1) * c(1) - s(2).scale(2)
    assert parse_chern_expr("(c1(E) + s1(E))^2") == (c(1) + s(1)) ** 2
    assert parse_chern_expr("-s1(E)") == s(1).scale(-1)
    assert parse_chern_expr("3/2") == constant(Fraction(3, 2))


def test_parse_errors():
    for bad in ("c1(E", "q1(E)", "c1(E) +", "c1(E)^(2)", "c1(E) $"):
        with pytest.raises(ValueError, match="parse error at position"):
            parse_chern_expr(bad)
