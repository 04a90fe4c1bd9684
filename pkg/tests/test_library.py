from fractions import Fraction

import pytest

from orbigenus import library
from orbigenus.errors import ModelError
from orbigenus.localization import order_cutoff, orbifold_elliptic_genus


@pytest.mark.parametrize("k,chi", [(2, 6), (3, 8), (4, 9), (6, 10)])
def test_torus_quotient_euler(k, chi):
    m = library.make_torus_quotient(k)
    assert library.lattice_euler_oracle(k) == chi
    assert library.orbifold_euler_number(m) == chi


def test_t4_z2_euler():
    assert library.lattice_euler_oracle(2, copies=2) == 24
    assert library.orbifold_euler_number(library.make_t4_z2()) == 24


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_fixed_counts_match_lattice(k):
    for j in range(1, k):
        assert library.fixed_count_det(k, j) == len(library.lattice_fixed_points(k, (j,)))


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_genus_at_y1_is_euler(k):
    m = library.make_torus_quotient(k)
    g = orbifold_elliptic_genus(m, order_cutoff(m, 0))
    assert g[0].specialize_y(0).scalar_at_u1() == g[0].specialize_y(0)
    assert str(g[0].specialize_y(0)) == str(library.lattice_euler_oracle(k))


def test_rotations_have_order_k():
    for k in library.ROTATIONS:
        assert library.rotation_power(k, k) == ((1, 0), (0, 1))
        assert all(library.rotation_power(k, j) != ((1, 0), (0, 1)) for j in range(1, k))


def test_spindle_sectors():
    m = library.make_spindle(2, 3)
    assert m.meta["sectors"] == ["X", "N1/2", "S1/3", "S2/3"]
    assert len(m.components) == 4 + 9
    # orbifold (stringy) Euler number of P(a, b) is a + b
    assert m.euler_number() == 5


def test_spindle_needs_coprime():
    with pytest.raises(ModelError):
        library.make_spindle(2, 4)


def test_registry_names():
    for name in ("cp1", "cp2", "pt_z3", "spindle_2_3", "t2_z4", "t4_z2", "half_cp1", "cp1_w2"):
        assert library.model_by_name(name).validate()
    with pytest.raises(ModelError):
        library.model_by_name("k3")


def test_registry_lists_families():
    for k in ("cp1", "cp2", "pt_zn", "spindle_a_b", "t2_zk", "t4_z2"):
        assert k in library.REGISTRY


def test_builtins_validate():
    ms = library.builtin_models()
    assert len(ms) == 8
    for m in ms:
        m.validate()


def test_bad_torus_order():
    with pytest.raises(ModelError):
        library.make_torus_quotient(5)


def test_cp1_w_shapes():
    assert library.make_cp1(w="trivial").rank_w == 1
    assert library.make_cp1(w=(2, -2)).components[0].w_lines[0].v == 2
    with pytest.raises(ModelError):
        library.make_cp1(w=(1,))
    with pytest.raises(ModelError):
        library.make_cp1(0)


def test_point_quotient_weights():
    m = library.make_point_quotient(4)
    assert sum(c.weight for c in m.components) == 4
    assert all(c.weight == Fraction(1, 4) for c in m.components)


def test_spindle_1_1_is_cp1():
    s, c = library.make_spindle(1, 1), library.make_cp1()
    cut = order_cutoff(c, 2)
    assert orbifold_elliptic_genus(s, cut) == orbifold_elliptic_genus(c, cut)
    assert s.meta["sectors"] == ["X"]


def test_point_quotient_trivial_group():
    assert len(library.make_point_quotient(1).components) == 1
