import sys
from fractions import Fraction
from pathlib import Path

import pytest

from orbigenus import bundles
from orbigenus.errors import ArithmeticPreconditionError
from orbigenus.localization import order_cutoff
from orbigenus.model import FixedComponent, LineDatum, OrbifoldModel
from orbigenus.rings.cyclo import CycloRat
from orbigenus.rings.tower import Tower, TowerContext

sys.path.insert(0, str(Path(__file__).parent))
from sectors import sectors  # noqa: E402


def point(normal, w=()):
    return FixedComponent("p", 0, 0, {}, [], list(normal), list(w))


def test_todd_and_ahat_coefficients():
    # x/(1-e^-x) = 1 + x/2 + x^2/12 - x^4/720
    assert bundles.todd_coeffs(4) == (1, Fraction(1, 2), Fraction(1, 12), 0, Fraction(-1, 720))
    # x/(2 sinh(x/2)) = 1 - x^2/24 + 7x^4/5760
    assert bundles.ahat_coeffs(4) == (1, 0, Fraction(-1, 24), 0, Fraction(7, 5760))


def test_fermionic_shift():
    c = point([LineDatum("normal", Fraction(1, 3)), LineDatum("normal", Fraction(1, 2), v=1)],
              [LineDatum("w_bundle", Fraction(1, 4))])
    assert bundles.fermionic_shift(c) == Fraction(5, 6)
    assert bundles.fermionic_shift(c, "w") == Fraction(1, 4)


def test_ch_twisted_point():
    ctx = TowerContext(M=12, D=8)
    c = point([LineDatum("normal", 0, Fraction(1, 3), 1)])
    lines = [LineDatum("w_bundle", 0, Fraction(1, 3), 1), LineDatum("w_bundle", 0, Fraction(1, 4), -2)]
    ch = bundles.ch_twisted(ctx, c, lines)
    assert ch.coefficient(u=1) == CycloRat.exp2pii(Fraction(1, 3), 12)
    assert ch.coefficient(u=-2) == CycloRat.exp2pii(Fraction(1, 4), 12)
    flat = bundles.ch_twisted(ctx, c, lines, equivariant=False)
    assert flat.coefficient() == CycloRat.exp2pii(Fraction(1, 3), 12) + CycloRat.exp2pii(Fraction(1, 4), 12)


def test_sym_of_q_on_trivial_line_is_geometric():
    ctx = TowerContext(M=4, D=8)
    c = point([])
    t = Tower.monomial(ctx, q=1)
    s = bundles.sym_lambda_ch(ctx, c, LineDatum("w_bundle"), t, "sym", 5)
    for n in range(5):
        assert s.coefficient(q=n) == CycloRat.rational(1, 4)
    assert len(s.terms) == 5


def test_lambda_half_twisted_line():
    # Lambda_{-y q^{1/2}} on a line with phase -1 gives 1 + y q^{1/2}
    ctx = TowerContext(M=4, D=8)
    c = point([])
    t = Tower.monomial(ctx, q=Fraction(1, 2), y=1, c=-1)
    out = bundles.sym_lambda_ch(ctx, c, LineDatum("w_bundle", 0, Fraction(1, 2)), t, "lambda", 2)
    assert out.coefficient(q=Fraction(1, 2), y=1) == CycloRat.rational(1, 4)
    assert out.coefficient() == CycloRat.rational(1, 4)


def test_sym_noninvertible():
    ctx = TowerContext(M=4, D=8)
    with pytest.raises(ArithmeticPreconditionError):
        bundles.sym_lambda_ch(ctx, point([]), LineDatum("w_bundle"), Tower.one(ctx), "sym", 2)


def test_smooth_point_q0_layer():
    # one tangent line of a curve: q^0 part is 1 - y^{-1} e^{-x}
    comp = FixedComponent("c", 1, 1, {(1,): Fraction(1)}, [LineDatum("tangent_fixed", c1=(1,))], [])
    m = OrbifoldModel("curve", "sector_sum", 1, 0, [comp])
    ctx = m.tower_context(comp)
    el = bundles.witten_element_direct(comp, ctx, Fraction(1, 8))
    th = bundles.witten_element_theta(comp, ctx, Fraction(1, 8))
    assert el.cross_equal(th, Fraction(1, 8))


def test_two_paths_random_sectors():
    for m in sectors(2024, 50):
        c = m.components[0]
        ctx = m.tower_context(c)
        cut = order_cutoff(m, 3)
        d = bundles.witten_element_direct(c, ctx, cut)
        t = bundles.witten_element_theta(c, ctx, cut)
        assert d.cross_equal(t, cut), c


def test_two_paths_random_w_sectors():
    for m in sectors(7, 20, "w"):
        c = m.components[0]
        ctx = m.tower_context(c)
        cut = order_cutoff(m, 2)
        d = bundles.witten_element_direct(c, ctx, cut, "w")
        t = bundles.witten_element_theta(c, ctx, cut, "w")
        assert d.cross_equal(t, cut), c


def test_spin_two_paths_real_half_line():
    comp = point([LineDatum("normal", Fraction(1, 2), Fraction(1, 2), 0, real=True)])
    m = OrbifoldModel("t", "sector_sum", 1, 0, [comp])
    ctx = m.tower_context(comp)
    cut = order_cutoff(m, 2)
    d = bundles.spin_element_direct(comp, ctx, cut)
    t = bundles.spin_element_theta(comp, ctx, cut)
    assert d.cross_equal(t, cut)
