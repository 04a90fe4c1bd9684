"""Localization data: line data, fixed components, orbifold models."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations_with_replacement

from .errors import ModelError, ModelIncompleteError
from .rings.cyclo import lcm
from .rings.tower import TowerContext
from .theta import ArgSpec

LINE_KINDS = ("tangent_fixed", "normal", "w_bundle")


def frac01(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class LineDatum:
    kind: str
    lambda_h: Fraction = Fraction(0)
    lambda_g: Fraction = Fraction(0)
    v: int = 0
    c1: tuple = ()
    real: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lambda_h", Fraction(self.lambda_h))
        object.__setattr__(self, "lambda_g", Fraction(self.lambda_g))
        object.__setattr__(self, "c1", tuple(Fraction(c) for c in self.c1))
        if self.kind not in LINE_KINDS:
            raise ModelError(f"unknown line kind {self.kind!r}")
        if int(self.v) != self.v:
            raise ModelError(f"rotation weight must be an integer, got {self.v}")
        object.__setattr__(self, "v", int(self.v))
        for nm in ("lambda_h", "lambda_g"):
            lam = getattr(self, nm)
            if not 0 <= lam < 1:
                raise ModelError(f"{nm} = {lam} must lie in [0, 1)")
        if self.kind == "tangent_fixed" and (self.lambda_h or self.lambda_g or self.v):
            raise ModelError("tangent_fixed line must have lambda_h = lambda_g = 0 and v = 0")
        if self.kind == "normal" and not (self.lambda_h or self.lambda_g or self.v):
            raise ModelError("normal line with (lambda_h, lambda_g, v) = (0, 0, 0) belongs in the tangent list")
        if self.real and self.lambda_h not in (0, Fraction(1, 2)):
            raise ModelError(f"real line needs lambda_h in {{0, 1/2}}, got {self.lambda_h}")

    def arg(self, with_z: bool = False) -> ArgSpec:
        """Theta argument x + lambda_g - tau*lambda_h (+ z) + t*v."""
        return ArgSpec(self.c1, self.lambda_g, -self.lambda_h, 1 if with_z else 0, self.v)

    def as_w(self) -> "LineDatum":
        return replace(self, kind="w_bundle")

    def transported(self, A) -> "LineDatum":
        lh = frac01(A.a * self.lambda_h - A.c * self.lambda_g)
        lg = frac01(A.d * self.lambda_g - A.b * self.lambda_h)
        kind = self.kind
        if kind != "w_bundle":
            kind = "tangent_fixed" if (lh == 0 and lg == 0 and self.v == 0) else "normal"
        return replace(self, kind=kind, lambda_h=lh, lambda_g=lg)

    def key(self):
        return (self.kind, self.lambda_h, self.lambda_g, self.v, self.c1, self.real)


def top_monomials(rank: int, degree: int):
    out = []
    for combo in combinations_with_replacement(range(rank), degree):
        m = [0] * rank
        for i in combo:
            m[i] += 1
        out.append(tuple(m))
    return out


@dataclass
class FixedComponent:
    label: str
    dim_c: int = 0
    h2_rank: int = 0
    intersection: dict = field(default_factory=dict)
    tangent: list = field(default_factory=list)
    normal: list = field(default_factory=list)
    w_lines: list = field(default_factory=list)
    weight: Fraction = Fraction(1)
    isotropy_order: int = 1
    count: int = 1
    pair: tuple | None = None

    def __post_init__(self):
        self.weight = Fraction(self.weight)
        self.intersection = {tuple(k): Fraction(v) for k, v in self.intersection.items()}

    @property
    def lines(self):
        return list(self.tangent) + list(self.normal)

    def validate(self):
        if len(self.tangent) != self.dim_c:
            raise ModelError(f"{self.label}: {len(self.tangent)} tangent lines for dim_c = {self.dim_c}")
        if self.weight <= 0:
            raise ModelError(f"{self.label}: weight must be positive")
        if self.count < 1:
            raise ModelError(f"{self.label}: count must be >= 1")
        for ln in self.tangent:
            if ln.kind != "tangent_fixed":
                raise ModelError(f"{self.label}: tangent list holds a {ln.kind} line")
        for ln in self.normal:
            if ln.kind != "normal":
                raise ModelError(f"{self.label}: normal list holds a {ln.kind} line")
        for ln in self.w_lines:
            if ln.kind != "w_bundle":
                raise ModelError(f"{self.label}: w_lines holds a {ln.kind} line")
        for ln in self.tangent + self.normal + self.w_lines:
            if len(ln.c1) > self.h2_rank:
                raise ModelError(f"{self.label}: c1 vector {ln.c1} longer than h2 rank {self.h2_rank}")
        if self.dim_c and self.h2_rank:
            for m in top_monomials(self.h2_rank, self.dim_c):
                if m not in self.intersection:
                    raise ModelIncompleteError(f"{self.label}: intersection functional misses monomial {m}")
        return self

    def padded(self, ln: LineDatum) -> LineDatum:
        return replace(ln, c1=tuple(ln.c1) + (Fraction(0),) * (self.h2_rank - len(ln.c1)))

    def zero_functional(self) -> bool:
        return self.dim_c > 0 and (self.h2_rank == 0 or not any(self.intersection.values()))

    def shape_key(self, twist):
        """Identical keys give identical unweighted contributions."""
        w = tuple(ln.key() for ln in self.w_lines) if twist == "w" else None
        return (self.dim_c, self.h2_rank, tuple(sorted(self.intersection.items())),
                tuple(ln.key() for ln in self.tangent), tuple(ln.key() for ln in self.normal), w)

    def denominators(self):
        out = []
        for ln in self.tangent + self.normal + self.w_lines:
            out += [ln.lambda_h.denominator, ln.lambda_g.denominator]
        return out


@dataclass
class OrbifoldModel:
    name: str
    mode: str = "sector_sum"
    dim_c: int = 0
    rank_w: int = 0
    components: list = field(default_factory=list)
    level: int = 1
    group: tuple = ()
    meta: dict = field(default_factory=dict)

    def validate(self):
        if self.mode not in ("sector_sum", "commuting_pair"):
            raise ModelError(f"unknown mode {self.mode!r}")
        if self.level < 0:
            raise ModelError("level must be >= 0 (0 means c1 = 0, every N allowed)")
        for c in self.components:
            c.validate()
            if c.dim_c + len(c.normal) != self.dim_c:
                raise ModelError(f"{c.label}: tangent + normal rank {c.dim_c + len(c.normal)} != dim_c {self.dim_c}")
            if c.w_lines and len(c.w_lines) != self.rank_w:
                raise ModelError(f"{c.label}: {len(c.w_lines)} W-lines for rank_w = {self.rank_w}")
        if self.mode == "commuting_pair":
            if not self.group:
                raise ModelError("commuting_pair mode needs a declared group")
            order = 1
            for k in self.group:
                order *= k
            for c in self.components:
                if c.weight != Fraction(1, order):
                    raise ModelError(f"{c.label}: pair-mode weight must be 1/|G| = 1/{order}")
        M, D = self.context()
        for c in self.components:
            for d in c.denominators():
                if M % d or D % d:
                    raise ModelError(f"{c.label}: denominator {d} does not divide context M={M}, D={D}")
        return self

    def context(self):
        dens = [1]
        for c in self.components:
            dens += c.denominators()
        M = 2 * lcm(4, self.level or 1, *dens)
        D = lcm(8, *(2 * d for d in dens))
        return M, D

    def tower_context(self, comp: FixedComponent) -> TowerContext:
        M, D = self.context()
        return TowerContext(M, D, comp.h2_rank, comp.dim_c)

    def group_order(self) -> int:
        n = 1
        for k in self.group:
            n *= k
        return n

    def has_w(self) -> bool:
        return any(c.w_lines for c in self.components)

    def with_components(self, comps, **kw):
        return replace(self, components=list(comps), **kw)

    def euler_number(self) -> Fraction:
        """sum weight * count * chi(F); chi from the top Chern class of the tangent lines."""
        total = Fraction(0)
        for c in self.components:
            if c.dim_c == 0:
                chi = Fraction(1)
            elif c.zero_functional():
                chi = Fraction(0)
            else:
                chi = euler_char(c)
            total += c.weight * c.count * chi
        return total


def euler_char(c: FixedComponent) -> Fraction:
    # product of tangent c1 vectors paired with the functional
    poly = {tuple([0] * c.h2_rank): Fraction(1)}
    for ln in c.tangent:
        ln = c.padded(ln)
        nxt = {}
        for m, a in poly.items():
            for i, b in enumerate(ln.c1):
                if b:
                    m2 = list(m)
                    m2[i] += 1
                    m2 = tuple(m2)
                    nxt[m2] = nxt.get(m2, 0) + a * b
        poly = nxt
    return sum((a * c.intersection.get(m, 0) for m, a in poly.items()), Fraction(0))


def disjoint_union(a: OrbifoldModel, b: OrbifoldModel, name=None) -> OrbifoldModel:
    if a.dim_c != b.dim_c or a.rank_w != b.rank_w:
        raise ModelError("disjoint union needs equal dim_c and rank_w")
    return OrbifoldModel(name or f"{a.name}+{b.name}", "sector_sum", a.dim_c, a.rank_w,
                         list(a.components) + list(b.components), _join_level(a.level, b.level))


def product_model(a: OrbifoldModel, b: OrbifoldModel, name=None) -> OrbifoldModel:
    """Componentwise product; Chern generators are concatenated."""
    comps = []
    for ca in a.components:
        for cb in b.components:
            ra, rb = ca.h2_rank, cb.h2_rank

            def sh(ln, left):
                c1 = tuple(ln.c1) + (Fraction(0),) * ((ra if left else rb) - len(ln.c1))
                return replace(ln, c1=c1 + (Fraction(0),) * rb if left else (Fraction(0),) * ra + c1)

            inter = {}
            fa = {(): Fraction(1)} if ca.dim_c == 0 else ca.intersection
            fb = {(): Fraction(1)} if cb.dim_c == 0 else cb.intersection
            for ma, va in fa.items():
                ma = ma if ma else (0,) * ra
                for mb, vb in fb.items():
                    mb = mb if mb else (0,) * rb
                    inter[tuple(ma) + tuple(mb)] = va * vb
            if ca.dim_c + cb.dim_c == 0:
                inter = {}
            else:
                for m in top_monomials(ra + rb, ca.dim_c + cb.dim_c):
                    inter.setdefault(m, Fraction(0))
            comps.append(FixedComponent(
                f"{ca.label}x{cb.label}", ca.dim_c + cb.dim_c, ra + rb, inter,
                [sh(l, True) for l in ca.tangent] + [sh(l, False) for l in cb.tangent],
                [sh(l, True) for l in ca.normal] + [sh(l, False) for l in cb.normal],
                [sh(l, True) for l in ca.w_lines] + [sh(l, False) for l in cb.w_lines],
                ca.weight * cb.weight, ca.isotropy_order * cb.isotropy_order, ca.count * cb.count))
    return OrbifoldModel(name or f"{a.name}x{b.name}", "sector_sum", a.dim_c + b.dim_c,
                         a.rank_w + b.rank_w, comps, _join_level(a.level, b.level))


def _join_level(a, b):
    # c1 = 0 mod a and mod b on the two pieces: gcd works for both; 0 is neutral
    from math import gcd

    return gcd(a, b)
