"""Jacobi theta functions as exact tower series, plus a numeric evaluator.

Conventions (product forms, q = e^{2 pi i tau}, c(q) = prod (1 - q^k)):

    theta(v)  = c q^{1/8} 2 sin(pi v) prod (1 - q^k w)(1 - q^k / w)
    theta1(v) = c q^{1/8} 2 cos(pi v) prod (1 + q^k w)(1 + q^k / w)
    theta2(v) = c prod (1 - q^{k-1/2} w)(1 - q^{k-1/2} / w)
    theta3(v) = c prod (1 + q^{k-1/2} w)(1 + q^{k-1/2} / w)

with w = e^{2 pi i v}.  An argument v = x + alpha + beta*tau + s*z + v*t
substitutes w -> zeta^alpha q^beta y^s u^v exp(x), where the nilpotent x
is stored already multiplied by 2 pi i (a usual Chern root).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import ArithmeticPreconditionError, DomainError, ReductionRequiredError
from .rings.cyclo import lcm
from .rings.qseries import QSeries, euler_product
from .rings.tower import Tower, TowerContext

KINDS = ("theta", "theta1", "theta2", "theta3")


@dataclass(frozen=True)
class ArgSpec:
    nil: tuple = ()
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    s: Fraction = Fraction(0)
    v: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "nil", tuple(Fraction(c) for c in self.nil))
        for f in ("alpha", "beta", "s", "v"):
            object.__setattr__(self, f, Fraction(getattr(self, f)))

    def __add__(self, other):
        n = max(len(self.nil), len(other.nil))
        a = self.nil + (Fraction(0),) * (n - len(self.nil))
        b = other.nil + (Fraction(0),) * (n - len(other.nil))
        return ArgSpec(tuple(x + y for x, y in zip(a, b)), self.alpha + other.alpha,
                       self.beta + other.beta, self.s + other.s, self.v + other.v)

    def __neg__(self):
        return ArgSpec(tuple(-c for c in self.nil), -self.alpha, -self.beta, -self.s, -self.v)

    def scaled(self, k):
        k = Fraction(k)
        return ArgSpec(tuple(c * k for c in self.nil), self.alpha * k, self.beta * k, self.s * k, self.v * k)

    def with_(self, **kw):
        d = dict(nil=self.nil, alpha=self.alpha, beta=self.beta, s=self.s, v=self.v)
        d.update(kw)
        return ArgSpec(**d)

    def is_nilpotent_only(self):
        return not (self.alpha or self.beta or self.s or self.v)

    def normalized(self):
        """(sign, arg) with alpha moved into [0, 1); theta(arg + 1) = -theta(arg)."""
        n = self.alpha.numerator // self.alpha.denominator
        return (-1) ** (n % 2), self.with_(alpha=self.alpha - n)

    def min_context(self, ngens=None, max_degree=0) -> TowerContext:
        M = lcm(4, 2 * (self.alpha.denominator))
        D = lcm(8, 2 * self.beta.denominator)
        if (self.s * 2).denominator != 1 or (self.v * 2).denominator != 1:
            raise ArithmeticPreconditionError("z and t coefficients must be integers for half-angle factors")
        return TowerContext(M, D, len(self.nil) if ngens is None else ngens, max_degree)


def w_power(ctx: TowerContext, arg: ArgSpec, p) -> Tower:
    """w^p = exp(2 pi i p arg) as an exact tower monomial times exp(p x)."""
    p = Fraction(p)
    mono = Tower.monomial(ctx, q=p * arg.beta, y=p * arg.s, u=p * arg.v, zeta=p * arg.alpha)
    if any(arg.nil) and ctx.max_degree:
        mono = mono * Tower.exp_linear(ctx, _pad(arg.nil, ctx.ngens), p)
    return mono


def _pad(nil, n):
    if len(nil) > n:
        if any(nil[n:]):
            raise ArithmeticPreconditionError("argument uses more Chern generators than the context has")
        return nil[:n]
    return tuple(nil) + (Fraction(0),) * (n - len(nil))


@lru_cache(maxsize=None)
def _c_terms(cut):
    """Coefficients of c(q) = prod(1 - q^k) with exponents < cut (integers)."""
    order = max(int(cut), 0)
    s = euler_product(order)
    return tuple((int(e), c) for e, c in s.terms.items() if e < cut)


def c_series(ctx: TowerContext, cutoff) -> Tower:
    cutoff = Fraction(cutoff)
    t = Tower.zero(ctx)
    terms = {}
    zero = ctx.zero_mono()
    for e, c in _c_terms(cutoff):
        terms[(ctx.qn(e), 0, 0, 0, zero)] = Fraction(c)
    return Tower(ctx, terms, ctx.qcut(cutoff) if cutoff > 0 else 0)


def _product(ctx, factors, cutoff):
    """prod (1 + sign * X) truncated below cutoff; X are exact towers."""
    out = Tower.one(ctx)
    cut_exp = Fraction(cutoff)
    for sign, x in factors:
        out = (out * (Tower.one(ctx) + x.scale(sign))).truncate(cut_exp)
    out.cutoff = ctx.qcut(cut_exp)
    return out


def _factors(ctx, arg, start, sign, cutoff):
    """Factors (1 + sign q^{k+start} w^{+-1}), k >= 0, split by the sign of the q-power.

    Returns (nonpositive, positive); positive ones only below ``cutoff``.
    """
    w = w_power(ctx, arg, 1)
    wi = w_power(ctx, arg, -1)
    pos, neg = [], []
    k = 0
    while True:
        ep, em = start + k + arg.beta, start + k - arg.beta
        if min(ep, em) >= cutoff and min(ep, em) > 0:
            break
        for e, base in ((ep, w), (em, wi)):
            x = (sign, base.shift(q=start + k))
            if e <= 0:
                neg.append(x)
            elif e < cutoff:
                pos.append(x)
        k += 1
    return neg, pos


def _theta_core(ctx, arg, kind, q_cutoff, literal):
    q_cutoff = Fraction(q_cutoff)
    start = Fraction(1) if kind in ("theta", "theta1") else Fraction(1, 2)
    sign = -1 if kind in ("theta", "theta2") else 1
    if kind in ("theta", "theta1"):
        h = w_power(ctx, arg, Fraction(1, 2))
        hi = w_power(ctx, arg, Fraction(-1, 2))
        pref = (h - hi) if kind == "theta" else (h + hi)
        if kind == "theta":
            pref = pref * Tower.i_unit(ctx, -1)
        pref = pref.shift(q=Fraction(1, 8))
    else:
        pref = Tower.one(ctx)
    neg, _ = _factors(ctx, arg, start, sign, Fraction(0))
    if neg and not literal:
        raise ReductionRequiredError(
            f"argument tau-coefficient {arg.beta} needs quasi_reduce before expansion")
    # nonpositive-exponent factors are exact Laurent polynomials
    neg_prod = Tower.one(ctx)
    for sg, x in neg:
        neg_prod = neg_prod * (Tower.one(ctx) + x.scale(sg))
    if not pref.canonical().terms or not neg_prod.canonical().terms:
        return Tower.zero(ctx, ctx.qcut(q_cutoff))
    f_pref = Fraction(pref.floor, ctx.D)
    f_neg = Fraction(neg_prod.floor, ctx.D)
    target = q_cutoff - f_pref - f_neg
    _, pos = _factors(ctx, arg, start, sign, target)
    body = c_series(ctx, target) * _product(ctx, pos, target)
    out = pref * (neg_prod * body)
    return out.truncate(q_cutoff)


def theta_series(arg: ArgSpec, kind: str = "theta", q_cutoff=3, ctx: TowerContext | None = None,
                 literal: bool = False) -> Tower:
    """Exact expansion valid for q-exponents below q_cutoff.

    With ``literal`` the product is expanded even when some factors carry
    non-positive q-powers (they are then exact Laurent polynomials); the
    default refuses such arguments and asks for quasi_reduce.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown theta kind {kind!r}")
    if ctx is None:
        ctx = arg.min_context(max_degree=max(1, len(arg.nil)) if arg.nil else 0)
    lim = 1 if kind in ("theta", "theta1") else Fraction(1, 2)
    if not literal and abs(arg.beta) >= lim:
        raise ReductionRequiredError(f"tau-coefficient {arg.beta} outside (-{lim}, {lim}); use quasi_reduce")
    return _theta_core(ctx, arg, kind, q_cutoff, literal)


def theta_over_root(ctx: TowerContext, nil, q_cutoff) -> Tower:
    """theta(x)/x for a purely nilpotent argument x (x already carries 2 pi i)."""
    q_cutoff = Fraction(q_cutoff)
    x = Tower.nilpotent_linear(ctx, _pad(tuple(nil), ctx.ngens))
    d = ctx.max_degree
    # 2 sinh(x/2)/x
    sh = x.compose([Fraction(1, 2**n * factorial(n + 1)) if n % 2 == 0 else 0 for n in range(d + 1)])
    pref = (sh * Tower.i_unit(ctx, -1)).shift(q=Fraction(1, 8))
    target = q_cutoff - Fraction(1, 8)
    arg = ArgSpec(nil=tuple(nil))
    _, pos = _factors(ctx, arg, Fraction(1), -1, target)
    body = c_series(ctx, target) * _product(ctx, pos, target)
    return (pref * body).truncate(q_cutoff)


def theta_prime_zero(q_cutoff, ctx: TowerContext | None = None) -> Tower:
    """theta'(0, tau) = 2 pi q^{1/8} c(q)^3, stored as -i q^{1/8} c^3 with grade 1."""
    q_cutoff = Fraction(q_cutoff)
    ctx = ctx or TowerContext()
    target = q_cutoff - Fraction(1, 8)
    c = c_series(ctx, target)
    c3 = c * c * c
    return (c3 * Tower.i_unit(ctx, -1)).shift(q=Fraction(1, 8)).truncate(q_cutoff).regrade(1)


def quasi_reduce(arg: ArgSpec, k: int, a: int, b: int, ctx: TowerContext):
    """theta(x + k(t + a tau + b)) = phase * theta(x + k t) for even a, b.

    Returns (phase, reduced argument x + k t); phase is
    e^{-pi i (2 k a x + 2 k^2 a t + k^2 a^2 tau)} with x the full base argument.
    """
    if a % 2 or b % 2:
        raise ArithmeticPreconditionError(f"quasi_reduce needs even a, b (got a={a}, b={b})")
    reduced = arg + ArgSpec(v=k)
    phase = w_power(ctx, arg, -k * a) * Tower.monomial(ctx, q=Fraction(-k * k * a * a, 2), u=-k * k * a)
    return phase, reduced


def shifted_arg(arg: ArgSpec, k: int, a: int, b: int) -> ArgSpec:
    return arg + ArgSpec(v=k, beta=k * a, alpha=k * b)


def quasi_periodicity_check(k: int, a: int, b: int, q_cutoff=8) -> bool:
    """Exact series comparison of both sides of the even-lattice shift law below q^cutoff."""
    ctx = TowerContext(M=4, D=8, ngens=1, max_degree=3)
    arg = ArgSpec(nil=(1,))
    lhs = theta_series(shifted_arg(arg, k, a, b), "theta", q_cutoff, ctx, literal=True)
    ph, red = quasi_reduce(arg, k, a, b, ctx)
    rhs = ph * theta_series(red, "theta", Fraction(q_cutoff) + Fraction(k * k * a * a, 2) + 1, ctx)
    return lhs.agrees_below(rhs, q_cutoff)


def theta3_sum_side(ctx: TowerContext, q_cutoff) -> Tower:
    """sum_n q^{n^2/2} w^n with w = u (argument t)."""
    q_cutoff = Fraction(q_cutoff)
    out = Tower.zero(ctx)
    n = 0
    while Fraction(n * n, 2) < q_cutoff:
        out = out + Tower.monomial(ctx, q=Fraction(n * n, 2), u=n)
        if n:
            out = out + Tower.monomial(ctx, q=Fraction(n * n, 2), u=-n)
        n += 1
    out.cutoff = ctx.qcut(q_cutoff)
    return out


def theta3_triple_product_check(q_cutoff=10) -> bool:
    ctx = TowerContext(M=4, D=8)
    prod = theta_series(ArgSpec(v=1), "theta3", q_cutoff, ctx)
    return prod == theta3_sum_side(ctx, q_cutoff)


# numerics -------------------------------------------------------------
def theta_eval_numeric(kind: str, t: complex, tau: complex, K: int = 50) -> complex:
    """Truncated product with K factors; relative error O(|q|^K)."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError(f"Im tau must be positive, got {tau}")
    if K < 1:
        raise DomainError("need at least one product term")
    q = cmath.exp(2j * cmath.pi * tau)
    w = cmath.exp(2j * cmath.pi * t)
    wi = 1 / w
    c = 1
    for k in range(1, K + 1):
        c *= 1 - q**k
    if kind in ("theta", "theta1"):
        q8 = cmath.exp(1j * cmath.pi * tau / 4)
        if kind == "theta":
            pref = 2 * cmath.sin(cmath.pi * t)
            sg = -1
        else:
            pref = 2 * cmath.cos(cmath.pi * t)
            sg = 1
        p = c * q8 * pref
        for k in range(1, K + 1):
            p *= (1 + sg * q**k * w) * (1 + sg * q**k * wi)
        return p
    if kind in ("theta2", "theta3"):
        sg = -1 if kind == "theta2" else 1
        qh = cmath.exp(1j * cmath.pi * tau)
        p = c
        for k in range(1, K + 1):
            qk = q ** (k - 1) * qh
            p *= (1 + sg * qk * w) * (1 + sg * qk * wi)
        return p
    raise ValueError(f"unknown theta kind {kind!r}")


def transformation_residuals(t: complex, tau: complex, K: int = 50) -> dict:
    """Relative residuals of the four basic theta laws at one point."""
    th = lambda a, b: theta_eval_numeric("theta", a, b, K)
    base = th(t, tau)
    scale = max(abs(base), 1e-300)
    q = cmath.exp(2j * cmath.pi * tau)
    out = {}
    out["t+1"] = abs(th(t + 1, tau) + base) / scale
    out["t+tau"] = abs(th(t + tau, tau) + q ** -0.5 * cmath.exp(-2j * cmath.pi * t) * base) / (
        abs(q ** -0.5 * cmath.exp(-2j * cmath.pi * t)) * scale)
    rhs = (1 / 1j) * cmath.sqrt(tau / 1j) * cmath.exp(1j * cmath.pi * t * t / tau) * base
    out["S"] = abs(th(t / tau, -1 / tau) - rhs) / max(abs(rhs), 1e-300)
    out["T"] = abs(th(t, tau + 1) - cmath.exp(1j * cmath.pi / 4) * base) / scale
    return out


@dataclass(frozen=True)
class SL2Matrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ArithmeticPreconditionError(f"det != 1 for {self}")

    def __matmul__(self, o):
        return SL2Matrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                         self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def act(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def S(cls):
        return cls(0, -1, 1, 0)

    @classmethod
    def T(cls, n=1):
        return cls(1, n, 0, 1)

    @classmethod
    def parse(cls, text: str):
        text = text.strip()
        if text in ("S", "T", "I", "id"):
            return {"S": cls.S(), "T": cls.T(), "I": cls.identity(), "id": cls.identity()}[text]
        parts = [int(p) for p in text.replace(",", " ").split()]
        if len(parts) != 4:
            raise ValueError(f"matrix needs four integers: {text!r}")
        return cls(*parts)
