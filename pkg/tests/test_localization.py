from fractions import Fraction

import pytest

from orbigenus import library
from orbigenus.errors import ArithmeticPreconditionError, ModelError
from orbigenus.localization import (equivariant_genus, lefschetz_cx, lefschetz_spin, order_cutoff,
                                    orbifold_elliptic_genus, spin_genus)
from orbigenus.model import FixedComponent, LineDatum, OrbifoldModel, disjoint_union, product_model
from orbigenus.rings.yupoly import YUPoly


def Y(*pairs):
    """sum c * y^e from (e, c) pairs."""
    out = YUPoly.const(0)
    for e, c in pairs:
        out = out + YUPoly.y(Fraction(e)).scale(c)
    return out


def U(e):
    return YUPoly.u(Fraction(e))


CHI_CP1 = Y(("1/2", 1), ("-1/2", 1))


def g0(model, order=0, **kw):
    return orbifold_elliptic_genus(model, order_cutoff(model, order), **kw)


def curve(genus):
    comp = FixedComponent("C", 1, 1, {(1,): Fraction(2 - 2 * genus)}, [LineDatum("tangent_fixed", c1=(1,))], [])
    return OrbifoldModel(f"curve{genus}", "sector_sum", 1, 0, [comp])


# chi_y layer -----------------------------------------------------------------------
def test_cp1_q0():
    assert g0(library.make_cp1())[0] == CHI_CP1
    assert g0(library.make_cp1(2))[0] == CHI_CP1


def test_cp2_q0():
    assert g0(library.make_cpn(2))[0] == Y((1, 1), (0, 1), (-1, 1))


def test_curves_from_chern_data():
    # no group action; the answer comes from c1 integration alone
    assert g0(curve(0))[0] == CHI_CP1
    assert g0(curve(2))[0] == CHI_CP1.scale(-1)


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_point_quotient(n):
    for m in (library.make_point_quotient(n), library.make_point_quotient_sectors(n)):
        g = g0(m, 2)
        assert g[0] == YUPoly.const(n)
        assert g.orders() == [0]


def test_spindle_q0():
    g = g0(library.make_spindle(2, 3))
    # y^(1/6) lies outside the half-integer monomial constructor; compare printed form
    assert str(g[0]) == "y^(1/2) + y^(1/6) + 1 + y^(-1/6) + y^(-1/2)"


def test_k3_q0():
    g = g0(library.make_t4_z2())
    assert g[0] == Y((1, 2), (0, 20), (-1, 2))
    assert g[0].specialize_y(0) == YUPoly.const(24)


def test_k3_q1_weak_jacobi_form():
    # 2 phi_{0,1}: the q^1 coefficient of the K3 elliptic genus
    g = orbifold_elliptic_genus(library.make_t4_z2(), order_cutoff(library.make_t4_z2(), 1))
    assert g[1] == Y((2, 20), (1, -128), (0, 216), (-1, -128), (-2, 20))


def test_equivariant_cp1_rigid_at_q0_and_y_minus_one():
    m = library.make_cp1()
    cut = order_cutoff(m, 2)
    g = equivariant_genus(m, cut)
    assert g[0].is_constant_in_u()
    assert not g[1].is_constant_in_u()
    for e, c in equivariant_genus(m, cut, y=Fraction(1, 2)).items():
        assert c.is_constant_in_u()


def test_meta_records_normalization():
    g = g0(library.make_cp1())
    assert "y^(m/2 - F)" in g.meta["normalization"]


# two paths on the built-ins ----------------------------------------------------------
@pytest.mark.parametrize("m", library.builtin_models(), ids=lambda m: m.name)
def test_direct_equals_theta(m):
    cut = order_cutoff(m, 2)
    assert equivariant_genus(m, cut) == equivariant_genus(m, cut, path="theta")


# degenerations -------------------------------------------------------------------------
@pytest.mark.parametrize("m", library.builtin_models(), ids=lambda m: m.name)
def test_tangent_twist_degenerates(m):
    cut = order_cutoff(m, 3)
    assert equivariant_genus(library.with_tangent_w(m), cut, "w") == equivariant_genus(m, cut)


def test_disjoint_union_additive():
    a, b = library.make_cp1(), library.make_spindle(2, 3)
    u = disjoint_union(a, b)
    cut = order_cutoff(u, 3)
    assert equivariant_genus(u, cut) == equivariant_genus(a, cut) + equivariant_genus(b, cut)


def test_product_multiplicative():
    a = library.make_cp1()
    p = product_model(a, a)
    cut = order_cutoff(p, 3)
    ga = equivariant_genus(a, cut)
    assert equivariant_genus(p, cut) == ga * ga


def test_twist_w_without_lines_refused():
    m = library.make_cp1()
    m = m.with_components(m.components, rank_w=1)
    with pytest.raises(ArithmeticPreconditionError):
        equivariant_genus(m, 1, "w")


def test_inconsistent_model_refused():
    m = library.make_cp1()
    with pytest.raises(ModelError):
        g0(m.with_components(m.components, dim_c=2))


# spin and Lefschetz layers ----------------------------------------------------------------
def test_spin_point_and_sphere():
    pt = OrbifoldModel("pt", "sector_sum", 0, 0, [FixedComponent("p", 0, 0, {}, [], [])])
    assert spin_genus(pt, 1)[0] == YUPoly.const(1)
    s2 = library.make_cp1()
    assert spin_genus(s2, 1)[0].is_zero()


def test_spin_t2_z2_paths():
    m = library.make_torus_quotient(2)
    cut = order_cutoff(m, 2)
    d, t = spin_genus(m, cut), spin_genus(m, cut, "theta")
    assert d == t
    assert d[0] == YUPoly.const(4)


def test_lefschetz_cx():
    assert lefschetz_cx(library.make_cp1(w="trivial"))[0] == YUPoly.const(1)
    assert lefschetz_cx(library.make_cp1(w="tangent"))[0] == U(1) + 1 + U(-1)
    assert lefschetz_cx(library.make_point_quotient(3))[0] == YUPoly.const(3)


def test_lefschetz_spin():
    assert lefschetz_spin(library.make_cp1())[0].is_zero()


def test_threads_do_not_change_output(monkeypatch):
    m = library.make_spindle(2, 3)
    cut = order_cutoff(m, 1)
    base = equivariant_genus(m, cut).text_lines()
    monkeypatch.setenv("ORBIGENUS_THREADS", "3")
    assert equivariant_genus(m, cut).text_lines() == base
