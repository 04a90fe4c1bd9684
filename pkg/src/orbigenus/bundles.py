"""Chern characters of q-operations and Witten elements on a fixed component.

Every element is built twice: by direct expansion of the Sym/Lambda
products, and as a closed theta quotient.  Lines carry the data
(lambda_h, lambda_g, v, c1); on a line we write

    E = exp(2 pi i lambda_g) u^v exp(x),     a = lambda_h,

with x the usual Chern root (the c1 vector in the component's H^2 basis).
Duals contribute E^-1.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import ArithmeticPreconditionError, ModelError
from .model import FixedComponent, LineDatum
from .rings.tower import Tower, TowerContext, TowerFrac
from .theta import ArgSpec, c_series, theta_over_root, theta_series, w_power


# power series in one variable --------------------------------------------
def series_div(num, den, n):
    out = []
    num = list(num) + [Fraction(0)] * n
    d0 = Fraction(den[0])
    for k in range(n + 1):
        s = Fraction(num[k]) - sum(out[j] * den[k - j] for j in range(max(0, k - len(den) + 1), k))
        out.append(s / d0)
    return out


@lru_cache(maxsize=None)
def todd_coeffs(n):
    """x / (1 - e^-x)."""
    den = [Fraction((-1) ** k, factorial(k + 1)) for k in range(n + 1)]
    return tuple(series_div([1], den, n))


@lru_cache(maxsize=None)
def ahat_coeffs(n):
    """x / (e^{x/2} - e^{-x/2})."""
    den = [Fraction(1, 2**k * factorial(k + 1)) if k % 2 == 0 else Fraction(0) for k in range(n + 1)]
    return tuple(series_div([1], den, n))


@lru_cache(maxsize=None)
def spin_tangent_coeffs(n):
    """x (1 + e^-x) / (1 - e^-x) = x coth(x/2)."""
    num = [Fraction(2)] + [Fraction((-1) ** k, factorial(k)) for k in range(1, n + 1)]
    den = [Fraction((-1) ** k, factorial(k + 1)) for k in range(n + 1)]
    return tuple(series_div(num, den, n))


def _root(ctx, comp, ln):
    return Tower.nilpotent_linear(ctx, comp.padded(ln).c1)


def line_E(ctx, comp, ln, p=1) -> Tower:
    """E^p for the line (no q or y part)."""
    ln = comp.padded(ln)
    return w_power(ctx, ArgSpec(ln.c1, ln.lambda_g, 0, 0, ln.v), p)


def w_lines_for(comp: FixedComponent, twist: str):
    if twist == "tangent":
        return [ln.as_w() for ln in comp.lines]
    if twist == "w":
        return list(comp.w_lines)
    raise ValueError(f"unknown twist {twist!r}")


# single operations ---------------------------------------------------------
def sym_lambda_ch(ctx: TowerContext, comp: FixedComponent, line: LineDatum, t: Tower, op: str,
                  q_cutoff, dual: bool = False):
    """ch(Lambda_t L) = 1 + t e^x or ch(Sym_t L) = 1/(1 - t e^x) (L* with ``dual``)."""
    E = line_E(ctx, comp, line, -1 if dual else 1)
    te = t * E
    if op == "lambda":
        return (Tower.one(ctx) + te).truncate(q_cutoff)
    if op != "sym":
        raise ValueError(f"op must be 'sym' or 'lambda', got {op!r}")
    f = te.canonical().floor
    if f is not None and f > 0:
        return te.geometric(q_cutoff)
    one_minus = Tower.one(ctx) - te
    low = one_minus.canonical().qslice(0)
    zero = ctx.zero_mono()
    if not any(k[4] == zero for k in low.terms):
        raise ArithmeticPreconditionError("Sym_t with t e^x of q-order 0 and unit scalar part is not invertible")
    return one_minus.inverse(q_cutoff)


def ch_twisted(ctx, comp, lines, equivariant: bool = True) -> Tower:
    """sum_j exp(2 pi i lambda_g_j) (u^v_j) e^{w_j}."""
    out = Tower.zero(ctx)
    for ln in lines:
        ln2 = ln if equivariant else LineDatum(ln.kind, ln.lambda_h, ln.lambda_g, 0, ln.c1, ln.real)
        out = out + line_E(ctx, comp, ln2)
    return out


def fermionic_shift(comp: FixedComponent, twist: str = "tangent") -> Fraction:
    lines = comp.normal if twist == "tangent" else comp.w_lines
    return sum((ln.lambda_h for ln in lines), Fraction(0))


def _geo(ctx, x, cut):
    return x.geometric(cut)


def _sym_products(ctx, comp, ln, cut, plus=False):
    """prod_k 1/((1 - q^{k-1+a} E^-1)(1 - q^{k-a} E)), or with plus the Lambda_q numerators too."""
    a = ln.lambda_h
    E, Ei = line_E(ctx, comp, ln), line_E(ctx, comp, ln, -1)
    out = Tower.one(ctx)
    k = 1
    while True:
        e1 = (k if a == 0 else k - 1 + a)
        e2 = k - a
        if min(e1, e2) >= cut:
            break
        for e, base in ((e1, Ei), (e2, E)):
            if e >= cut:
                continue
            x = base.shift(q=e)
            out = (out * _geo(ctx, x, cut)).truncate(cut)
            if plus:
                out = (out * (Tower.one(ctx) + x)).truncate(cut)
        k += 1
    out.cutoff = ctx.qcut(cut)
    return out


def _lambda_products(ctx, comp, ln, cut):
    """prod_k (1 - y^-1 q^{k-1+a} E^-1)(1 - y q^{k-a} E) for a W-line."""
    a = ln.lambda_h
    E, Ei = line_E(ctx, comp, ln), line_E(ctx, comp, ln, -1)
    out = Tower.one(ctx)
    k = 1
    while True:
        e1, e2 = k - 1 + a, k - a
        if min(e1, e2) >= cut:
            break
        if e1 < cut:
            out = (out * (Tower.one(ctx) - Ei.shift(q=e1, y=-1))).truncate(cut)
        if e2 < cut:
            out = (out * (Tower.one(ctx) - E.shift(q=e2, y=1))).truncate(cut)
        k += 1
    out.cutoff = ctx.qcut(cut)
    return out


def _inv_or_fail(t: Tower, cut, what):
    low = t.canonical()
    zero = t.ctx.zero_mono()
    if not any(k[4] == zero for k in low.terms):
        raise ArithmeticPreconditionError(f"{what}: division by a nilpotent class (normal line with trivial eigenvalue)")
    return t.inverse(cut)


# complex Witten elements -----------------------------------------------------
def witten_element_direct(comp: FixedComponent, ctx: TowerContext, q_cutoff, twist: str = "tangent") -> TowerFrac:
    """Todd x localization denominators x Sym(N) x Lambda(W), expanded factor by factor."""
    cut = Fraction(q_cutoff)
    d = ctx.max_degree
    out = TowerFrac(Tower.one(ctx))
    num = Tower.one(ctx)
    for ln in comp.tangent:
        num = num * _root(ctx, comp, ln).compose(todd_coeffs(d))
    for ln in comp.normal:
        if ln.lambda_h == 0:
            den = Tower.one(ctx) - line_E(ctx, comp, ln, -1)
            out = out * _inv_or_fail(den, cut, "localization factor")
    for ln in comp.lines:
        num = (num * _sym_products(ctx, comp, ln, cut)).truncate(cut)
    for ln in w_lines_for(comp, twist):
        num = (num * _lambda_products(ctx, comp, ln, cut)).truncate(cut)
    num.cutoff = ctx.qcut(cut) if num.cutoff is None else num.cutoff
    return (out * num).truncate(cut)


def _pref(ctx, power, cut):
    """(-i c q^{1/8})^power valid below cut."""
    if power == 0:
        return TowerFrac(Tower.one(ctx))
    c_cut = cut - Fraction(power, 8)
    unit = (c_series(ctx, c_cut) * Tower.i_unit(ctx, -1)).shift(q=Fraction(1, 8))
    if power > 0:
        return TowerFrac(unit ** power)
    inv = unit.inverse(c_cut - Fraction(1, 8))
    out = inv
    for _ in range(-power - 1):
        out = out * inv
    return out


def witten_element_theta(comp: FixedComponent, ctx: TowerContext, q_cutoff, twist: str = "tangent") -> TowerFrac:
    """(i^-1 c q^{1/8})^{l-m} prod_T x prod theta(s_W) / prod theta(s_N) e((sum s_N - sum s_W)/2)."""
    cut = Fraction(q_cutoff)
    wl = [comp.padded(ln) for ln in w_lines_for(comp, twist)]
    lines = [comp.padded(ln) for ln in comp.lines]
    l, m = len(lines), len(wl)
    out = _pref(ctx, l - m, cut + Fraction(l - m, 8))
    phase = Tower.one(ctx)
    for ln in wl:
        a = ln.lambda_h
        out = out * TowerFrac(theta_series(ln.arg(with_z=True), "theta", cut + Fraction(1, 8) - a / 2, ctx))
        phase = phase * w_power(ctx, ln.arg(with_z=True), Fraction(-1, 2))
    for ln in comp.tangent:
        ln = comp.padded(ln)
        tx = theta_over_root(ctx, ln.c1, cut + Fraction(1, 8))
        out = out * tx.inverse(cut - Fraction(1, 8))
        phase = phase * w_power(ctx, ln.arg(), Fraction(1, 2))
    for ln in comp.normal:
        ln = comp.padded(ln)
        a = ln.lambda_h
        th = theta_series(ln.arg(), "theta", cut + Fraction(1, 8) - a / 2, ctx)
        out = out * _inv_or_fail(th, cut - Fraction(1, 8) + a / 2, "theta denominator")
        phase = phase * w_power(ctx, ln.arg(), Fraction(1, 2))
    return (out * phase).truncate(cut)


# spin elements -----------------------------------------------------------------
def spin_element_direct(comp: FixedComponent, ctx: TowerContext, q_cutoff) -> TowerFrac:
    """Ahat(T) ch(S+ + S-) times the Lambda_q/Sym_q element, factor by factor."""
    cut = Fraction(q_cutoff)
    d = ctx.max_degree
    num = Tower.one(ctx)
    out = TowerFrac(Tower.one(ctx))
    for ln in comp.tangent:
        num = num * _root(ctx, comp, ln).compose(spin_tangent_coeffs(d))
    for ln in comp.normal:
        if ln.lambda_h == 0:
            E = line_E(ctx, comp, ln)
            num = num * (E + 1)
            out = out * _inv_or_fail(E - 1, cut, "spin localization factor")
    for ln in comp.lines:
        num = (num * _sym_products(ctx, comp, ln, cut, plus=True)).truncate(cut)
    num.cutoff = ctx.qcut(cut) if num.cutoff is None else num.cutoff
    return (out * num).truncate(cut)


def spin_element_theta(comp: FixedComponent, ctx: TowerContext, q_cutoff) -> TowerFrac:
    """prod_T (-i) x theta1(x)/theta(x) prod_N (-i) theta1(s)/theta(s)."""
    cut = Fraction(q_cutoff)
    out = TowerFrac(Tower.one(ctx))
    mi = Tower.i_unit(ctx, -1)
    for ln in comp.tangent:
        ln = comp.padded(ln)
        t1 = theta_series(ln.arg(), "theta1", cut + Fraction(1, 8), ctx)
        tx = theta_over_root(ctx, ln.c1, cut + Fraction(1, 8))
        out = out * TowerFrac(t1 * mi) * tx.inverse(cut - Fraction(1, 8))
    for ln in comp.normal:
        ln = comp.padded(ln)
        a = ln.lambda_h
        t1 = theta_series(ln.arg(), "theta1", cut + Fraction(1, 8) - a / 2, ctx)
        th = theta_series(ln.arg(), "theta", cut + Fraction(1, 8) - a / 2, ctx)
        out = out * TowerFrac(t1 * mi) * _inv_or_fail(th, cut - Fraction(1, 8) + a / 2, "theta denominator")
    return out.truncate(cut)


def spin_factors(comp: FixedComponent, ctx: TowerContext, q_cutoff) -> dict:
    """Ahat(T), prod Ahat_theta(N), the direct spin element and its theta form."""
    d = ctx.max_degree
    ahat = Tower.one(ctx)
    for ln in comp.tangent:
        ahat = ahat * _root(ctx, comp, ln).compose(ahat_coeffs(d))
    return {
        "ahat": ahat,
        "ahat_normal": ahat_normal(comp, ctx),
        "direct": spin_element_direct(comp, ctx, q_cutoff),
        "theta": spin_element_theta(comp, ctx, q_cutoff),
    }


def ahat_normal(comp: FixedComponent, ctx: TowerContext) -> TowerFrac:
    """prod over normal lines of 1/(E^{1/2} - E^{-1/2}), E^{1/2} on the principal branch."""
    out = TowerFrac(Tower.one(ctx))
    for ln in comp.normal:
        h = line_E(ctx, comp, ln, Fraction(1, 2)) - line_E(ctx, comp, ln, Fraction(-1, 2))
        out = out * _inv_or_fail(h, Fraction(1, ctx.D), "Ahat normal factor")
    return out


# Lefschetz integrands (no q) -------------------------------------------------
def lefschetz_cx_integrand(comp: FixedComponent, ctx: TowerContext, twist: str = "w") -> TowerFrac:
    """Td(T) ch_g(W) / prod det(1 - g e^-x) over normal lines."""
    d = ctx.max_degree
    num = Tower.one(ctx)
    for ln in comp.tangent:
        num = num * _root(ctx, comp, ln).compose(todd_coeffs(d))
    wl = w_lines_for(comp, twist) if (twist == "tangent" or comp.w_lines) else []
    num = num * (ch_twisted(ctx, comp, wl) if wl else Tower.one(ctx))
    out = TowerFrac(num)
    for ln in comp.normal:
        out = out * _inv_or_fail(Tower.one(ctx) - line_E(ctx, comp, ln, -1), Fraction(1, ctx.D), "Lefschetz denominator")
    return out


def lefschetz_spin_integrand(comp: FixedComponent, ctx: TowerContext) -> TowerFrac:
    """Ahat(T) prod Ahat_theta(N) ch_g(W); W trivial of rank one if absent."""
    d = ctx.max_degree
    num = Tower.one(ctx)
    for ln in comp.tangent:
        num = num * _root(ctx, comp, ln).compose(ahat_coeffs(d))
    if comp.w_lines:
        num = num * ch_twisted(ctx, comp, comp.w_lines)
    return TowerFrac(num) * ahat_normal(comp, ctx)
