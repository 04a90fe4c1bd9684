"""Genus assembly: sum of weighted, integrated fixed-component contributions."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import bundles
from .errors import ArithmeticPreconditionError, GradeError
from .model import OrbifoldModel
from .rings.tower import TowerFrac
from .rings.yupoly import YUPoly


class GenusSeries:
    """q-exponent -> YUPoly, valid for exponents below ``cutoff``."""

    def __init__(self, terms, cutoff, meta=None, M=1):
        self.M = M
        self.cutoff = Fraction(cutoff)
        self.terms = {Fraction(e): c for e, c in terms.items() if Fraction(e) < self.cutoff and not c.is_zero()}
        self.meta = dict(meta or {})

    def __getitem__(self, e):
        e = Fraction(e)
        if e >= self.cutoff:
            raise KeyError(f"q^{e} lies beyond the cutoff {self.cutoff}")
        return self.terms.get(e, YUPoly({}, None, self.M))

    def orders(self):
        return sorted(self.terms)

    def items(self):
        return [(e, self.terms[e]) for e in self.orders()]

    def map(self, fn, **meta):
        m = dict(self.meta)
        m.update(meta)
        return GenusSeries({e: fn(c) for e, c in self.terms.items()}, self.cutoff, m, self.M)

    def __add__(self, other):
        cut = min(self.cutoff, other.cutoff)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return GenusSeries(terms, cut, self.meta, self.M)

    def __mul__(self, other):
        if not isinstance(other, GenusSeries):
            return self.map(lambda c: c * other)
        fa = min(self.terms, default=Fraction(0))
        fb = min(other.terms, default=Fraction(0))
        cut = min(self.cutoff + fb, other.cutoff + fa)
        terms = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = ea + eb
                if e < cut:
                    terms[e] = terms[e] + ca * cb if e in terms else ca * cb
        return GenusSeries(terms, cut, self.meta, self.M)

    def agrees(self, other, below=None) -> bool:
        cut = min(self.cutoff, other.cutoff)
        if below is not None:
            cut = min(cut, Fraction(below))
        keys = {e for e in set(self.terms) | set(other.terms) if e < cut}
        return all(self[e] == other[e] for e in keys)

    def __eq__(self, other):
        if not isinstance(other, GenusSeries):
            return NotImplemented
        return self.agrees(other)

    __hash__ = None

    def at_u1(self):
        return self.map(lambda c: c.scalar_at_u1(), specialization="u=1")

    def specialize_y(self, z):
        return self.map(lambda c: c.specialize_y(z), y=f"exp(2 pi i {Fraction(z)})")

    def is_rational(self) -> bool:
        return all(c.is_rational_valued() for c in self.terms.values())

    def text_lines(self, through=None):
        out = []
        for e, c in self.items():
            if through is not None and e > Fraction(through):
                continue
            out.append(f"q^({e}): {c}")
        return out

    def to_json(self, through=None):
        terms = []
        for e, c in self.items():
            if through is not None and e > Fraction(through):
                continue
            j = c.to_json()
            entry = {"q": str(e), "coeff": j["num"]}
            if "den" in j:
                entry["den"] = j["den"]
            terms.append(entry)
        return {"schema": 1, "terms": terms, "meta": {"cutoff": str(self.cutoff), **{k: str(v) for k, v in self.meta.items()}}}

    def __repr__(self):
        return f"GenusSeries({'; '.join(self.text_lines())} | cutoff {self.cutoff})"


# component contributions -------------------------------------------------------
ELEMENTS = {
    ("elliptic", "direct"): lambda c, ctx, cut, tw: bundles.witten_element_direct(c, ctx, cut, tw),
    ("elliptic", "theta"): lambda c, ctx, cut, tw: bundles.witten_element_theta(c, ctx, cut, tw),
    ("spin", "direct"): lambda c, ctx, cut, tw: bundles.spin_element_direct(c, ctx, cut),
    ("spin", "theta"): lambda c, ctx, cut, tw: bundles.spin_element_theta(c, ctx, cut),
    ("lefschetz_cx", "direct"): lambda c, ctx, cut, tw: bundles.lefschetz_cx_integrand(c, ctx, tw),
    ("lefschetz_spin", "direct"): lambda c, ctx, cut, tw: bundles.lefschetz_spin_integrand(c, ctx),
}


def component_contribution(model: OrbifoldModel, comp, q_cutoff, twist="tangent", kind="elliptic", path="direct",
                           extra=None):
    """Unweighted integrated contribution: q-exponent -> YUPoly.

    ``extra(comp, ctx)`` may supply a grade-0 Tower multiplied in before integration.
    """
    if comp.zero_functional():
        return {}
    ctx = model.tower_context(comp)
    try:
        build = ELEMENTS[(kind, path)]
    except KeyError:
        raise ValueError(f"no {path} path for genus kind {kind!r}") from None
    el = build(comp, ctx, Fraction(q_cutoff), twist)
    if extra is not None:
        el = el * TowerFrac(extra(comp, ctx))
    el = el.integrate(comp.intersection)
    grade = el.num.grade - el.den.grade
    if el.num.terms and grade != 0:
        raise GradeError(f"{comp.label}: contribution ends at 2 pi i-grade {grade}")
    coeffs = el.coefficients()
    if kind == "elliptic":
        m = model.dim_c if twist == "tangent" else model.rank_w
        shift = Fraction(m, 2) - bundles.fermionic_shift(comp, twist)
        coeffs = {e: c.shift_y(shift) for e, c in coeffs.items()}
    return coeffs


def _job(args):
    return component_contribution(*args)


def threads() -> int:
    try:
        return max(1, int(os.environ.get("ORBIGENUS_THREADS", "1")))
    except ValueError:
        return 1


def assemble(model: OrbifoldModel, q_cutoff, twist="tangent", kind="elliptic", path="direct") -> GenusSeries:
    model.validate()
    if kind == "elliptic" and twist == "w" and model.rank_w and not model.has_w():
        raise ArithmeticPreconditionError("twist 'w' needs W-lines in the model")
    q_cutoff = Fraction(q_cutoff)
    M, D = model.context()
    # identical components are computed once
    keys, uniq = [], {}
    for c in model.components:
        k = c.shape_key(twist)
        keys.append(k)
        if k not in uniq:
            uniq[k] = c
    order = list(uniq)
    jobs = [(model, uniq[k], q_cutoff, twist, kind, path) for k in order]
    n = threads()
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(n, len(jobs))) as ex:
            results = list(ex.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]
    table = dict(zip(order, results))
    total = {}
    for c, k in zip(model.components, keys):
        w = c.weight * c.count
        for e, v in table[k].items():
            v = v.scale(w)
            total[e] = total[e] + v if e in total else v
    if kind in ("lefschetz_cx", "lefschetz_spin"):
        cut = Fraction(1, D)
    else:
        cut = q_cutoff
    meta = {"genus": kind, "twist": twist, "path": path, "grade_audit": 0}
    if kind == "elliptic":
        meta["normalization"] = "y^(m/2 - F) per sector, m = " + ("dim_c" if twist == "tangent" else "rank_w")
        meta["theta_prefactor"] = "(i^-1 c(q) q^(1/8))^(l-m) included; theta'(0)^l / theta(z)^m not applied"
    elif kind == "spin":
        meta["normalization"] = "i^(-n) per sector, no y"
    return GenusSeries(total, cut, meta, M)


def equivariant_genus(model, q_cutoff, twist="tangent", path="direct", y=None) -> GenusSeries:
    g = assemble(model, q_cutoff, twist, "elliptic", path)
    return g if y is None else g.specialize_y(y)


def orbifold_elliptic_genus(model, q_cutoff, twist="tangent", path="direct") -> GenusSeries:
    """Non-equivariant genus: the u = 1 value of the equivariant one."""
    return equivariant_genus(model, q_cutoff, twist, path).at_u1()


def spin_genus(model, q_cutoff, path="direct", equivariant=False) -> GenusSeries:
    g = assemble(model, q_cutoff, "tangent", "spin", path)
    return g if equivariant else g.at_u1()


def lefschetz_cx(model, q_cutoff=1, twist="w") -> GenusSeries:
    return assemble(model, q_cutoff, twist, "lefschetz_cx", "direct")


def lefschetz_spin(model, q_cutoff=1) -> GenusSeries:
    return assemble(model, q_cutoff, "tangent", "lefschetz_spin", "direct")


def order_cutoff(model, order) -> Fraction:
    """Exclusive cutoff that keeps every exponent <= order."""
    _, D = model.context()
    return Fraction(order) + Fraction(1, D)
