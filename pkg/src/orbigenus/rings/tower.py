"""Flat sparse tower elements.

A ``Tower`` is a truncated series in q whose coefficients are Laurent
polynomials in y^(1/2) and u^(1/2) over Q(zeta_M), tensored with a
truncated Chern-class polynomial ring.  All five layers are flattened into
one dict keyed by

    (q_num, y2, s, z, mono)

meaning ``q^(q_num/D) * y^(y2/2) * u^(s/2) * zeta_M^z * H^mono`` with a
rational coefficient.  Between operations the zeta part is kept as a plain
sum over exponents mod M; :meth:`Tower.canonical` reduces it modulo the
cyclotomic polynomial so that equality is exact.

Rational functions in u enter only through :class:`TowerFrac`, whose
denominator is a y-, q- and Chern-free Laurent polynomial in u.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import factorial

from ..errors import ArithmeticPreconditionError, GradeError, ModelIncompleteError
from .cyclo import CycloRat, cyclo_reduce, power_table, totient
from .yupoly import YUPoly


@dataclass(frozen=True)
class TowerContext:
    M: int = 4
    D: int = 8
    ngens: int = 0
    max_degree: int = 0

    def zero_mono(self):
        return (0,) * self.ngens

    def qn(self, e) -> int:
        e = Fraction(e) * self.D
        if e.denominator != 1:
            raise ArithmeticPreconditionError(f"q-exponent {Fraction(e, self.D)} not representable with D={self.D}")
        return int(e)

    def qcut(self, e) -> int:
        """Smallest grid index not below the exclusive cutoff e."""
        e = Fraction(e) * self.D
        return -((-e.numerator) // e.denominator)

    def zn(self, lam) -> int:
        z = Fraction(lam) * self.M
        if z.denominator != 1:
            raise ArithmeticPreconditionError(f"exp(2 pi i {lam}) not representable with M={self.M}")
        return int(z) % self.M

    def scalar_ctx(self) -> "TowerContext":
        return replace(self, ngens=0, max_degree=0)


def _half(e, what) -> int:
    e2 = Fraction(e) * 2
    if e2.denominator != 1:
        raise ArithmeticPreconditionError(f"{what}-exponent {e} must lie in (1/2)Z")
    return int(e2)


def _cut_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Tower:
    __slots__ = ("ctx", "terms", "cutoff", "grade")

    def __init__(self, ctx: TowerContext, terms=None, cutoff=None, grade: int = 0):
        self.ctx = ctx
        self.cutoff = cutoff
        self.grade = grade
        if terms is None:
            self.terms = {}
        elif cutoff is None:
            self.terms = {k: v for k, v in terms.items() if v}
        else:
            self.terms = {k: v for k, v in terms.items() if v and k[0] < cutoff}

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ctx, cutoff=None):
        return cls(ctx, {}, cutoff)

    @classmethod
    def one(cls, ctx):
        return cls(ctx, {(0, 0, 0, 0, ctx.zero_mono()): 1})

    @classmethod
    def monomial(cls, ctx, q=0, y=0, u=0, zeta=0, c=1, mono=None, grade=0):
        """c * q^q * y^y * u^u * exp(2 pi i zeta) * H^mono."""
        mono = ctx.zero_mono() if mono is None else tuple(mono)
        if sum(mono) > ctx.max_degree:
            return cls.zero(ctx)
        key = (ctx.qn(q), _half(y, "y"), _half(u, "u"), ctx.zn(zeta), mono)
        return cls(ctx, {key: Fraction(c)}, None, grade)

    @classmethod
    def from_cyclo(cls, ctx, c: CycloRat, q=0, y=0, u=0):
        c = c.embed(ctx.M)
        base = (ctx.qn(q), _half(y, "y"), _half(u, "u"))
        terms = {base + (j, ctx.zero_mono()): x for j, x in enumerate(c.c) if x}
        return cls(ctx, terms, None, c.grade)

    @classmethod
    def i_unit(cls, ctx, power: int = 1):
        return cls.monomial(ctx, zeta=Fraction(power, 4))

    @classmethod
    def nilpotent_linear(cls, ctx, coeffs, scale=1):
        """scale * sum_i coeffs[i] * H_i."""
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                mono = [0] * ctx.ngens
                mono[i] = 1
                if ctx.max_degree >= 1:
                    terms[(0, 0, 0, 0, tuple(mono))] = Fraction(c) * Fraction(scale)
        return cls(ctx, terms)

    @classmethod
    def exp_linear(cls, ctx, coeffs, scale=1):
        """exp(scale * sum_i coeffs[i] H_i), truncated at the context degree."""
        x = cls.nilpotent_linear(ctx, coeffs, scale)
        return x.compose([Fraction(1, factorial(k)) for k in range(ctx.max_degree + 1)])

    # basic structure --------------------------------------------------
    def copy(self):
        return Tower(self.ctx, dict(self.terms), self.cutoff, self.grade)

    def is_zero(self) -> bool:
        return not self.canonical().terms

    @property
    def floor(self):
        return min(k[0] for k in self.terms) if self.terms else None

    def q_exponents(self):
        return sorted({Fraction(k[0], self.ctx.D) for k in self.terms})

    def truncate(self, cutoff_exp) -> "Tower":
        cut = _cut_min(self.cutoff, self.ctx.qcut(cutoff_exp))
        return Tower(self.ctx, self.terms, cut, self.grade)

    def has_nilpotents(self) -> bool:
        zero = self.ctx.zero_mono()
        return any(k[4] != zero for k in self.terms)

    def _check(self, other):
        if isinstance(other, Tower):
            if other.ctx != self.ctx:
                raise ArithmeticPreconditionError(f"mixing tower contexts {self.ctx} and {other.ctx}")
            return other
        if isinstance(other, CycloRat):
            return Tower.from_cyclo(self.ctx, other)
        if isinstance(other, (int, Fraction)):
            return Tower(self.ctx, {(0, 0, 0, 0, self.ctx.zero_mono()): Fraction(other)})
        return None

    def _sum_grade(self, other):
        if not self.terms:
            return other.grade
        if not other.terms:
            return self.grade
        if self.grade != other.grade:
            raise GradeError(f"adding towers of 2*pi*i-grade {self.grade} and {other.grade}")
        return self.grade

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return Tower(self.ctx, terms, _cut_min(self.cutoff, other.cutoff), self._sum_grade(other))

    __radd__ = __add__

    def __neg__(self):
        return Tower(self.ctx, {k: -v for k, v in self.terms.items()}, self.cutoff, self.grade)

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Tower":
        c = Fraction(c)
        return Tower(self.ctx, {k: v * c for k, v in self.terms.items()}, self.cutoff, self.grade)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        if other is None:
            return NotImplemented
        a, b = self, other
        fa, fb = a.floor, b.floor
        cut = None
        if a.cutoff is not None:
            cut = a.cutoff + (fb if fb is not None else 0)
        if b.cutoff is not None:
            cut = _cut_min(cut, b.cutoff + (fa if fa is not None else 0))
        if not a.terms or not b.terms:
            return Tower(self.ctx, {}, cut, a.grade + b.grade)
        M = self.ctx.M
        maxdeg = self.ctx.max_degree
        ngens = self.ctx.ngens
        out = {}
        get = out.get
        bitems = sorted(b.terms.items(), key=lambda kv: kv[0][0])
        for (qa, ya, sa, za, ma), ca in a.terms.items():
            da = sum(ma) if ngens else 0
            for (qb, yb, sb, zb, mb), cb in bitems:
                qn = qa + qb
                if cut is not None and qn >= cut:
                    break
                if ngens:
                    if da + sum(mb) > maxdeg:
                        continue
                    m = tuple([x + y for x, y in zip(ma, mb)])
                else:
                    m = ma
                key = (qn, ya + yb, sa + sb, (za + zb) % M, m)
                out[key] = get(key, 0) + ca * cb
        return Tower(self.ctx, out, cut, a.grade + b.grade)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ArithmeticPreconditionError("use inverse() for negative powers")
        out = Tower.one(self.ctx)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, q=0, y=0, u=0, zeta=0) -> "Tower":
        """Multiply by the unit monomial q^q y^y u^u exp(2 pi i zeta)."""
        dq, dy, du, dz = self.ctx.qn(q), _half(y, "y"), _half(u, "u"), self.ctx.zn(zeta)
        M = self.ctx.M
        terms = {(k[0] + dq, k[1] + dy, k[2] + du, (k[3] + dz) % M, k[4]): v for k, v in self.terms.items()}
        cut = None if self.cutoff is None else self.cutoff + dq
        return Tower(self.ctx, terms, cut, self.grade)

    def compose(self, coeffs) -> "Tower":
        """sum_k coeffs[k] * self^k for an element with no q^0 constant part issue.

        Only meaningful when the powers of self die out (nilpotent part) or
        the cutoff stops the expansion (positive q-order).
        """
        out = Tower.zero(self.ctx)
        power = Tower.one(self.ctx)
        out.cutoff = None
        for a in coeffs:
            if a:
                out = out + power.scale(a)
            power = power * self
            if not power.terms:
                break
        if self.cutoff is not None:
            out.cutoff = _cut_min(out.cutoff, self.cutoff)
        return out

    def geometric(self, cutoff_exp) -> "Tower":
        """1/(1 - self) for self of strictly positive q-order."""
        f = self.floor
        if f is not None and f <= 0:
            raise ArithmeticPreconditionError("geometric series needs positive q-order")
        cut = self.ctx.qcut(cutoff_exp)
        cut = _cut_min(cut, self.cutoff)
        out = Tower.one(self.ctx)
        power = Tower.one(self.ctx)
        while True:
            power = (power * self).truncate(Fraction(cut, self.ctx.D))
            if not power.terms:
                break
            out = out + power
        out.cutoff = cut
        return out

    # canonical form / equality ----------------------------------------
    def canonical(self) -> "Tower":
        M = self.ctx.M
        phi = totient(M)
        if phi == M or not self.terms:
            return self.copy()
        table = power_table(M)
        groups = {}
        for (qn, y2, s, z, m), v in self.terms.items():
            gk = (qn, y2, s, m)
            vec = groups.get(gk)
            if vec is None:
                vec = groups[gk] = [0] * phi
            row = table[z]
            for i in range(phi):
                if row[i]:
                    vec[i] += v * row[i]
        terms = {}
        for (qn, y2, s, m), vec in groups.items():
            for i, x in enumerate(vec):
                if x:
                    terms[(qn, y2, s, i, m)] = x
        return Tower(self.ctx, terms, self.cutoff, self.grade)

    def __eq__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        cut = _cut_min(self.cutoff, other.cutoff)
        d = (self - other).canonical()
        return not any(cut is None or k[0] < cut for k in d.terms)

    __hash__ = None

    def agrees_below(self, other, cutoff_exp) -> bool:
        qn = self.ctx.qcut(cutoff_exp)
        d = (self - other).canonical()
        return not any(k[0] < qn for k in d.terms)

    # slices -----------------------------------------------------------
    def qslice(self, qn: int) -> "Tower":
        return Tower(self.ctx, {k: v for k, v in self.terms.items() if k[0] == qn}, None, self.grade)

    def coefficient(self, q=0, y=0, u=0, mono=None) -> CycloRat:
        mono = self.ctx.zero_mono() if mono is None else tuple(mono)
        key = (self.ctx.qn(q), _half(y, "y"), _half(u, "u"))
        vec = [0] * self.ctx.M
        for k, v in self.terms.items():
            if k[:3] == key and k[4] == mono:
                vec[k[3]] += v
        return cyclo_reduce(vec, self.ctx.M, self.grade)

    def mono_part(self, mono) -> "Tower":
        """Coefficient of the Chern monomial, as a Chern-free tower."""
        mono = tuple(mono)
        sctx = self.ctx.scalar_ctx()
        terms = {}
        for (qn, y2, s, z, m), v in self.terms.items():
            if m == mono:
                key = (qn, y2, s, z, ())
                terms[key] = terms.get(key, 0) + v
        return Tower(sctx, terms, self.cutoff, self.grade)

    def integrate(self, functional) -> "Tower":
        """Apply an intersection functional (top-degree monomial -> rational)."""
        d = self.ctx.max_degree
        sctx = self.ctx.scalar_ctx()
        terms = {}
        if d == 0:
            for (qn, y2, s, z, m), v in self.terms.items():
                key = (qn, y2, s, z, ())
                terms[key] = terms.get(key, 0) + v
            return Tower(sctx, terms, self.cutoff, self.grade)
        for (qn, y2, s, z, m), v in self.terms.items():
            if sum(m) != d:
                continue
            if m not in functional:
                raise ModelIncompleteError(f"intersection functional has no value for monomial {m}")
            w = functional[m]
            if w:
                key = (qn, y2, s, z, ())
                terms[key] = terms.get(key, 0) + v * Fraction(w)
        return Tower(sctx, terms, self.cutoff, self.grade)

    def substitute(self, new_ctx: TowerContext, images) -> "Tower":
        """Replace generator j by the Chern-linear tower images[j] (in new_ctx)."""
        out = {}
        powers = [[Tower.one(new_ctx)] for _ in images]
        cache = {}
        for (qn, y2, s, z, m), v in self.terms.items():
            mt = cache.get(m)
            if mt is None:
                mt = Tower.one(new_ctx)
                for j, e in enumerate(m):
                    while len(powers[j]) <= e:
                        powers[j].append(powers[j][-1] * images[j])
                    mt = mt * powers[j][e]
                cache[m] = mt
            for (_, _, _, _, m2), c in mt.terms.items():
                key = (qn, y2, s, z, m2)
                out[key] = out.get(key, 0) + v * c
        return Tower(new_ctx, out, self.cutoff, self.grade)

    def retarget(self, new_ctx: TowerContext) -> "Tower":
        """Move to a context with a multiple of M/D and the same Chern shape."""
        if new_ctx.M % self.ctx.M or new_ctx.D % self.ctx.D:
            raise ArithmeticPreconditionError("target context must refine the source context")
        if (new_ctx.ngens, new_ctx.max_degree) != (self.ctx.ngens, self.ctx.max_degree):
            raise ArithmeticPreconditionError("retarget keeps the Chern ring fixed")
        fz, fq = new_ctx.M // self.ctx.M, new_ctx.D // self.ctx.D
        terms = {(qn * fq, y2, s, z * fz, m): v for (qn, y2, s, z, m), v in self.terms.items()}
        cut = None if self.cutoff is None else self.cutoff * fq
        return Tower(new_ctx, terms, cut, self.grade)

    def scalar_slices(self):
        """Chern-free element: q_num -> {(y2, s): CycloRat}."""
        if self.has_nilpotents():
            raise ArithmeticPreconditionError("integrate Chern data before extracting coefficients")
        M = self.ctx.M
        groups = {}
        for (qn, y2, s, z, _), v in self.terms.items():
            vec = groups.setdefault(qn, {}).setdefault((y2, s), [0] * M)
            vec[z] += v
        out = {}
        for qn, d in groups.items():
            sl = {}
            for k, vec in d.items():
                c = cyclo_reduce(vec, M, self.grade)
                if not c.is_zero():
                    sl[k] = c
            if sl:
                out[qn] = sl
        return out

    # numerics ---------------------------------------------------------
    def evaluate(self, tau: complex, y_half: complex = 1, u_half: complex = 1) -> complex:
        """Numeric value with Chern classes set to zero; q^(e) = exp(2 pi i tau e)."""
        import cmath

        D, M = self.ctx.D, self.ctx.M
        zero = self.ctx.zero_mono()
        total = 0j
        for (qn, y2, s, z, m), v in self.terms.items():
            if m != zero:
                continue
            total += float(v) * cmath.exp(2j * cmath.pi * (tau * qn / D + z / M)) * y_half**y2 * u_half**s
        return total

    def regrade(self, k: int) -> "Tower":
        """Multiply by the formal factor (2 pi i)^k."""
        return Tower(self.ctx, self.terms, self.cutoff, self.grade + k)

    def __repr__(self):
        return f"Tower({len(self.terms)} terms, cutoff={None if self.cutoff is None else Fraction(self.cutoff, self.ctx.D)}, grade={self.grade})"

    # inversion --------------------------------------------------------
    def inverse(self, cutoff_exp) -> "TowerFrac":
        """Inverse as num/den with a y-free Laurent-in-u denominator.

        The lowest q-slice must be y^e times (a y-free Laurent polynomial in
        u plus nilpotents); the rest is inverted as a geometric series, valid
        below ``cutoff_exp`` (and below what the input cutoff supports).
        """
        ctx = self.ctx
        x = self.canonical()
        if not x.terms:
            raise ZeroDivisionError("inverse of zero tower")
        f = x.floor
        low = x.qslice(f)
        ys = {k[1] for k in low.terms}
        if len(ys) != 1:
            raise ArithmeticPreconditionError("leading q-slice is not a single y-power times a u-function")
        ye = ys.pop()
        yq = Fraction(ye, 2)
        fq = Fraction(f, ctx.D)
        x = x.shift(q=-fq, y=-yq)
        low = low.shift(q=-fq, y=-yq)
        rest = x - low
        zero = ctx.zero_mono()
        P = Tower(ctx, {k: v for k, v in low.terms.items() if k[4] == zero})
        N = low - P
        if not P.canonical().terms:
            raise ArithmeticPreconditionError("leading q-slice is nilpotent")
        s_vals = {k[2] for k in P.terms}
        d = ctx.max_degree if ctx.ngens else 0
        if len(s_vals) == 1:
            s0 = s_vals.pop()
            c = cyclo_reduce(_zvec(P, ctx.M), ctx.M, P.grade).inverse()
            p_inv = Tower.from_cyclo(ctx, c).shift(u=Fraction(-s0, 2))
            # 1/(P+N) = P^-1 * sum (-N P^-1)^k
            t = -(N * p_inv)
            a0 = p_inv * t.compose([1] * (d + 1))
            d0 = Tower.one(ctx.scalar_ctx())
        else:
            a0 = Tower.zero(ctx)
            mN = -N
            for k in range(d + 1):
                a0 = a0 + (mN**k) * (P**(d - k))
            d0 = P ** (d + 1)
            d0 = Tower(ctx.scalar_ctx(), {(q, y, s, z, ()): v for (q, y, s, z, _), v in d0.terms.items()}, None, d0.grade)
        # target cutoff for the shifted problem
        target = ctx.qcut(cutoff_exp) + f
        if x.cutoff is not None:
            target = min(target, x.cutoff)  # x is already shifted by -f
        rest = rest.truncate(Fraction(target, ctx.D))
        hmin = rest.floor
        if hmin is None:
            nmax = 0
        else:
            if hmin <= 0:
                raise ArithmeticPreconditionError("tail of the series must have positive q-order")
            nmax = max(0, -(-target // hmin) - 1)
        # (1+R)^-1 with R = a0*rest/d0 -> sum (-a0 rest)^n d0^(nmax-n) / d0^nmax
        d0_full = _lift_scalar(d0, ctx)
        mr = -(a0 * rest).truncate(Fraction(target, ctx.D))
        num = Tower.zero(ctx)
        term = Tower.one(ctx)
        d_pows = [Tower.one(ctx)]
        for _ in range(nmax):
            d_pows.append(d_pows[-1] * d0_full)
        for n in range(nmax + 1):
            num = num + term * d_pows[nmax - n]
            term = (term * mr).truncate(Fraction(target, ctx.D))
        num = (a0 * num).truncate(Fraction(target, ctx.D))
        num.cutoff = target
        den = d0 ** (nmax + 1)
        num = num.shift(q=-fq, y=-yq)
        return TowerFrac(num, den)


def _zvec(t: Tower, M: int):
    vec = [0] * M
    for k, v in t.terms.items():
        vec[k[3]] += v
    return vec


def _lift_scalar(d: Tower, ctx: TowerContext) -> Tower:
    zero = ctx.zero_mono()
    return Tower(ctx, {(q, y, s, z, zero): v for (q, y, s, z, _), v in d.terms.items()}, d.cutoff, d.grade)


class TowerFrac:
    """num / den with den a y-, q- and Chern-free Laurent polynomial in u."""

    __slots__ = ("num", "den")

    def __init__(self, num: Tower, den: Tower | None = None):
        self.num = num
        if den is None:
            den = Tower.one(num.ctx.scalar_ctx())
        if den.ctx.ngens:
            den = Tower(den.ctx.scalar_ctx(), {(q, y, s, z, ()): v for (q, y, s, z, _), v in den.terms.items()}, None, den.grade)
        self.den = den

    @property
    def ctx(self):
        return self.num.ctx

    @property
    def cutoff(self):
        return self.num.cutoff

    @classmethod
    def of(cls, x):
        return x if isinstance(x, TowerFrac) else cls(x)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TowerFrac(self.num.scale(other), self.den)
        other = TowerFrac.of(other)
        return TowerFrac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __add__(self, other):
        other = TowerFrac.of(other)
        if _same(self.den, other.den):
            return TowerFrac(self.num + other.num, self.den)
        a = self.num * _lift_scalar(other.den, self.ctx)
        b = other.num * _lift_scalar(self.den, self.ctx)
        return TowerFrac(a + b, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return TowerFrac(-self.num, self.den)

    def __sub__(self, other):
        return self + (-TowerFrac.of(other))

    def truncate(self, cutoff_exp):
        return TowerFrac(self.num.truncate(cutoff_exp), self.den)

    def cross_equal(self, other, cutoff_exp=None) -> bool:
        other = TowerFrac.of(other)
        a = self.num * _lift_scalar(other.den, self.ctx)
        b = other.num * _lift_scalar(self.den, self.ctx)
        if cutoff_exp is None:
            return a == b
        return a.agrees_below(b, cutoff_exp)

    def integrate(self, functional) -> "TowerFrac":
        return TowerFrac(self.num.integrate(functional), self.den)

    def shift(self, **kw):
        return TowerFrac(self.num.shift(**kw), self.den)

    def coefficients(self):
        """q-exponent -> YUPoly for a Chern-free element."""
        den_sl = self.den.scalar_slices()
        if set(den_sl) - {0} or any(y2 for (y2, _) in den_sl.get(0, {})):
            raise ArithmeticPreconditionError("denominator must be y- and q-free")
        den = {s: c for (_, s), c in den_sl.get(0, {}).items()}
        M = self.ctx.M
        out = {}
        for qn, sl in self.num.scalar_slices().items():
            out[Fraction(qn, self.ctx.D)] = YUPoly(sl, _den_shift(den, sl), M)
        return out


def _den_shift(den, sl):
    # YUPoly wants a dict keyed by s >= its own min; handled by _reduce via k0
    return dict(den)


def _same(a: Tower, b: Tower) -> bool:
    return a.terms == b.terms and a.grade == b.grade
