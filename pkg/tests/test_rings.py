import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbigenus.errors import GradeError, MalformedScalarError, NotNilpotentError
from orbigenus.rings import upoly
from orbigenus.rings.chern import ChernPoly, chern_exp
from orbigenus.rings.cyclo import CycloRat, cyclotomic_poly, totient
from orbigenus.rings.qseries import QSeries, euler_product
from orbigenus.rings.yupoly import YUPoly, u_ratfunc_reduce


# cyclotomic field ---------------------------------------------------------
def test_i_squared():
    z = CycloRat.zeta(4)
    assert z * z == CycloRat.rational(-1, 4)


def test_zeta5_sum_vanishes():
    s = sum((CycloRat.zeta(5, j) for j in range(5)), CycloRat.rational(0, 5))
    assert s.is_zero()


def test_zeta6_embeds_as_zeta12_squared():
    assert CycloRat.zeta(6).embed(12) == CycloRat.zeta(12, 2)
    assert CycloRat.zeta(12, 2).restrict(6) == CycloRat.zeta(6)


def test_restrict_rejects_outside_subfield():
    with pytest.raises(ValueError):
        CycloRat.zeta(12).restrict(6)


def test_exp2pii_needs_context():
    with pytest.raises(MalformedScalarError):
        CycloRat.exp2pii(Fraction(1, 3), 4)


def test_cyclotomic_poly_degrees():
    for M in (1, 2, 3, 4, 5, 6, 8, 12, 24):
        assert len(cyclotomic_poly(M)) - 1 == totient(M)


def test_to_complex_matches_exp():
    for M, k in ((5, 2), (8, 3), (12, 7)):
        assert abs(CycloRat.zeta(M, k).to_complex() - cmath.exp(2j * cmath.pi * k / M)) < 1e-12


def test_grade_mismatch_refuses_sum():
    a = CycloRat.rational(1, 4, grade=1)
    with pytest.raises(GradeError):
        a + CycloRat.rational(1, 4)


def test_inverse():
    x = CycloRat.zeta(8) + 2
    assert x * x.inverse() == CycloRat.rational(1, 8)


small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def cyclo(M):
    return st.lists(small, min_size=totient(M), max_size=totient(M)).map(lambda c: CycloRat(M, c))


@settings(max_examples=40, deadline=None)
@given(cyclo(12), cyclo(12), cyclo(12))
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == CycloRat.rational(1, 12)


@settings(max_examples=40, deadline=None)
@given(cyclo(6), cyclo(4))
def test_mixed_contexts_agree_numerically(a, b):
    assert abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-9


# polynomials and rational functions -----------------------------------------
def test_upoly_gcd():
    one = CycloRat.rational(1)
    mone = CycloRat.rational(-1)
    p = [mone, CycloRat.rational(0), one]  # u^2 - 1
    q = [mone, one]  # u - 1
    assert upoly.gcd(p, q) == upoly.normalize(q)
    quo, rem = upoly.divmod_(p, q)
    assert quo == upoly.normalize([one, one]) and rem == []


def test_ratfunc_reduces_to_polynomial():
    r = u_ratfunc_reduce({2: 1, 0: -1}, {1: 1, 0: -1})
    assert r == YUPoly.monomial(0, 1) + 1
    assert r.is_laurent()


def test_ratfunc_keeps_pole():
    r = u_ratfunc_reduce({0: 1}, {1: 1, 0: -1})
    assert r.has_pole_at_u1()
    assert not r.is_laurent()


def test_yupoly_specialize_y():
    chi = YUPoly.y(Fraction(1, 2)) + YUPoly.y(Fraction(-1, 2))
    assert chi.specialize_y(Fraction(1, 2)).is_zero()  # y = -1
    assert str(chi) == "y^(1/2) + y^(-1/2)"


# Chern polynomials --------------------------------------------------------------
def test_chern_exp_truncates():
    x = ChernPoly.gen(("a",), "a", 2)
    e = chern_exp(x)
    assert e.terms == {(0,): 1, (1,): 1, (2,): Fraction(1, 2)}


def test_chern_exp_needs_nilpotent():
    with pytest.raises(NotNilpotentError):
        chern_exp(ChernPoly.const(("a",), 1, 1))


def test_integrate_top_degree():
    x = ChernPoly.linear(("a", "b"), (1, 2), 2)
    sq = x * x  # a^2 + 4ab + 4b^2
    assert sq.integrate({(2, 0): 0, (1, 1): 1, (0, 2): 0}) == 4


# q-series ----------------------------------------------------------------------
def pentagonal(n_max):
    out = {}
    k = 0
    while True:
        hits = False
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e <= n_max:
                out[e] = (-1) ** abs(kk)
                hits = True
        if not hits and k > 0:
            return out
        k += 1


def test_euler_pentagonal_through_q30():
    c = euler_product(30)
    assert c.cutoff == 31
    assert c == QSeries(pentagonal(30), 31)


def test_partition_numbers():
    p = euler_product(10, -1)
    assert [p[n] for n in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert euler_product(10, 1) * p == QSeries({0: 1}, 11)


def test_qseries_beyond_cutoff_refused():
    with pytest.raises(KeyError):
        euler_product(3)[4]
