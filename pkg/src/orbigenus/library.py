"""Built-in model generators."""

from __future__ import annotations

import re
from dataclasses import replace
from fractions import Fraction
from itertools import product
from math import gcd

from .errors import ModelError
from .model import FixedComponent, LineDatum, OrbifoldModel

# integral rotations of Z^2 of order k (CM lattices for k = 3, 4, 6)
ROTATIONS = {
    2: ((-1, 0), (0, -1)),
    3: ((0, -1), (1, -1)),
    4: ((0, -1), (1, 0)),
    6: ((1, -1), (1, 0)),
}


def _matmul(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def rotation_power(k, j):
    R = ((1, 0), (0, 1))
    for _ in range(j % k):
        R = _matmul(R, ROTATIONS[k])
    return R


def fixed_count_det(k, j):
    """|Fix(R^j)| on T^2 as |det(1 - R^j)|; 0 for the identity (fixed set is all of T^2)."""
    R = rotation_power(k, j)
    a, b = 1 - R[0][0], -R[0][1]
    c, d = -R[1][0], 1 - R[1][1]
    return abs(a * d - b * c)


def lattice_fixed_points(k, gens, grid=12):
    """Brute force: points of (1/grid)Z^2 / Z^2 fixed by every R^j, j in gens."""
    mats = [rotation_power(k, j) for j in gens]
    pts = []
    for x, y in product(range(grid), repeat=2):
        ok = True
        for R in mats:
            rx = R[0][0] * x + R[0][1] * y - x
            ry = R[1][0] * x + R[1][1] * y - y
            if rx % grid or ry % grid:
                ok = False
                break
        if ok:
            pts.append((Fraction(x, grid), Fraction(y, grid)))
    return pts


def lattice_euler_oracle(k, copies=1):
    """(1/k) sum over pairs of chi(Fix), enumerating fixed points of T^(2*copies)."""
    total = 0
    for i, j in product(range(k), repeat=2):
        if i == 0 and j == 0:
            continue  # chi(T^2n) = 0
        total += len(lattice_fixed_points(k, (i, j))) ** copies
    return Fraction(total, k)


def _pt(label, normal, weight=1, iso=1, **kw):
    return FixedComponent(label, 0, 0, {}, [], normal, [], Fraction(weight), iso, **kw)


def make_cp1(rotation_weight=1, w=None):
    """S^1 on CP^1 with fixed points p+ (weight v) and p- (weight -v).

    w: None, "trivial", "tangent", or a pair of W weights (v at p+, v at p-).
    """
    v = int(rotation_weight)
    if v == 0:
        raise ModelError("make_cp1: rotation weight must be nonzero")
    comps = [_pt("p+", [LineDatum("normal", v=v)]), _pt("p-", [LineDatum("normal", v=-v)])]
    m = OrbifoldModel(f"cp1_w{v}" if v != 1 else "cp1", "sector_sum", 1, 0, comps, level=2)
    return _attach_w(m, w)


def _attach_w(m, w):
    if w is None:
        return m
    if w == "tangent":
        return with_tangent_w(m)
    if w == "trivial":
        comps = [replace(c, w_lines=[LineDatum("w_bundle")]) for c in m.components]
        return m.with_components(comps, rank_w=1, name=m.name + "_wO")
    ws = list(w)
    if len(ws) != len(m.components):
        raise ModelError("one W weight per fixed component expected")
    comps = [replace(c, w_lines=[LineDatum("w_bundle", v=int(x))]) for c, x in zip(m.components, ws)]
    return m.with_components(comps, rank_w=1, name=m.name + "_w")


def with_tangent_w(m: OrbifoldModel) -> OrbifoldModel:
    """W = TX: each component's W-lines are its tangent and normal lines."""
    comps = [replace(c, w_lines=[ln.as_w() for ln in c.tangent + c.normal]) for c in m.components]
    return m.with_components(comps, rank_w=m.dim_c, name=m.name + "_wT")


CPN_WEIGHTS = (0, 1, 3)


def make_cpn(n):
    if n not in (1, 2):
        raise ModelError("make_cpn: n must be 1 or 2")
    ws = CPN_WEIGHTS[: n + 1]
    comps = []
    for i, wi in enumerate(ws):
        normal = [LineDatum("normal", v=wj - wi) for j, wj in enumerate(ws) if j != i]
        comps.append(_pt(f"p{i}", normal))
    return OrbifoldModel(f"cp{n}", "sector_sum", n, 0, comps, level=n + 1)


def half_cp1():
    """Negative control: CP^1 with the p- fixed point dropped."""
    m = make_cp1(1)
    return m.with_components(m.components[:1], name="half_cp1")


def make_point_quotient(n):
    n = int(n)
    if n < 1:
        raise ModelError("make_point_quotient: n >= 1")
    comps = [_pt(f"({h},{g})", [], Fraction(1, n), n, pair=(h, g)) for h in range(n) for g in range(n)]
    return OrbifoldModel(f"pt_z{n}", "commuting_pair", 0, 0, comps, level=0, group=(n,))


def make_point_quotient_sectors(n):
    """Same orbifold in sector-sum mode: n twisted sectors, each pt/Z_n of index 1."""
    n = int(n)
    if n < 1:
        raise ModelError("make_point_quotient: n >= 1")
    comps = [_pt(f"X_{h}", [], 1, n) for h in range(n)]
    return OrbifoldModel(f"pt_z{n}_sectors", "sector_sum", 0, 0, comps, level=0)


def make_spindle(a, b):
    """Weighted projective line P(a, b): chart C/Z_a at one pole, C/Z_b at the other.

    Chart S^1-weights are b and -a so that the circle action lifts to both charts.
    Each local pair (h, g) = (j, j') of the isotropy group is one component of
    weight 1/order; the sector of a component is its h.
    """
    a, b = int(a), int(b)
    if a < 1 or b < 1 or gcd(a, b) != 1:
        raise ModelError(f"make_spindle: need coprime a, b >= 1, got ({a}, {b})")
    comps, sectors = [], ["X"]
    for pole, order, v in (("N", a, b), ("S", b, -a)):
        for j in range(order):
            if j:
                sectors.append(f"{pole}{j}/{order}")
            for jp in range(order):
                ln = LineDatum("normal", Fraction(j, order), Fraction(jp, order), v)
                comps.append(_pt(f"{pole}({j},{jp})", [ln], Fraction(1, order), order, pair=(j, jp)))
    name = f"spindle_{a}_{b}"
    return OrbifoldModel(name, "sector_sum", 1, 0, comps, level=1, meta={"sectors": sectors})


def make_torus_quotient(k):
    k = int(k)
    if k not in ROTATIONS:
        raise ModelError(f"make_torus_quotient: k must be one of 2, 3, 4, 6, got {k}")
    comps = []
    for i, j in product(range(k), repeat=2):
        w = Fraction(1, k)
        if i == 0 and j == 0:
            comps.append(FixedComponent("(0,0)", 1, 0, {}, [LineDatum("tangent_fixed")], [], [], w, 1, pair=(0, 0)))
            continue
        d = gcd(gcd(i, j), k)
        cnt = fixed_count_det(k, d)
        ln = LineDatum("normal", Fraction(i, k), Fraction(j, k), 0, real=(k == 2))
        comps.append(_pt(f"({i},{j})", [ln], w, k // d, count=cnt, pair=(i, j)))
    return OrbifoldModel(f"t2_z{k}", "commuting_pair", 1, 0, comps, level=0, group=(k,))


def make_t4_z2():
    comps = []
    w = Fraction(1, 2)
    for i, j in product(range(2), repeat=2):
        if i == 0 and j == 0:
            tl = [LineDatum("tangent_fixed"), LineDatum("tangent_fixed")]
            comps.append(FixedComponent("(0,0)", 2, 0, {}, tl, [], [], w, 1, pair=(0, 0)))
            continue
        cnt = fixed_count_det(2, 1) ** 2
        ln = LineDatum("normal", Fraction(i, 2), Fraction(j, 2), 0, real=True)
        comps.append(_pt(f"({i},{j})", [ln, ln], w, 2, count=cnt, pair=(i, j)))
    return OrbifoldModel("t4_z2", "commuting_pair", 2, 0, comps, level=0, group=(2,))


def orbifold_euler_number(model) -> Fraction:
    return model.euler_number()


# registry ------------------------------------------------------------------
REGISTRY = {
    "cp1": "CP^1 with weights +-1, level 2",
    "cp1_wv": "CP^1 with rotation weight v (e.g. cp1_w2)",
    "cp2": "CP^2 with torus weights (0, 1, 3), level 3",
    "pt_zn": "point modulo Z_n, commuting-pair mode (e.g. pt_z3)",
    "spindle_a_b": "weighted projective line P(a, b), a and b coprime (e.g. spindle_2_3)",
    "t2_zk": "T^2 / Z_k for k in 2, 3, 4, 6 (e.g. t2_z4)",
    "t4_z2": "T^4 / Z_2",
    "half_cp1": "one fixed point of CP^1 (negative control)",
}


def model_by_name(name: str) -> OrbifoldModel:
    if name == "cp1":
        return make_cp1(1)
    if name == "cp2":
        return make_cpn(2)
    if name == "t4_z2":
        return make_t4_z2()
    if name == "half_cp1":
        return half_cp1()
    m = re.fullmatch(r"pt_z(\d+)", name)
    if m:
        return make_point_quotient(int(m.group(1)))
    m = re.fullmatch(r"spindle_(\d+)_(\d+)", name)
    if m:
        return make_spindle(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"t2_z(\d+)", name)
    if m:
        return make_torus_quotient(int(m.group(1)))
    m = re.fullmatch(r"cp1_w(-?\d+)", name)
    if m:
        return make_cp1(int(m.group(1)))
    raise ModelError(f"unknown built-in model {name!r}; try: {', '.join(REGISTRY)}")


def builtin_models():
    """Instances used by the test-suite sweeps."""
    return [make_cp1(1), make_cpn(1), make_cpn(2), make_point_quotient(3), make_spindle(2, 3),
            make_torus_quotient(2), make_torus_quotient(3), make_t4_z2()]
