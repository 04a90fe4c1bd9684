"""Verdict engines: rigidity, anomaly identities, SL2(Z) transport, F^A, numeric scans."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import localization
from .errors import ArithmeticPreconditionError, ModelError
from .localization import GenusSeries, component_contribution
from .model import OrbifoldModel, frac01, top_monomials
from .rings.cyclo import CycloRat, lcm
from .rings.tower import Tower
from .rings.yupoly import YUPoly
from .theta import SL2Matrix, theta_eval_numeric


class LevelError(ModelError):
    """y is not an N-th root of unity for the model's level N."""


# y values --------------------------------------------------------------------
NAMED_Y = {"1": Fraction(0), "-1": Fraction(1, 2), "i": Fraction(1, 4), "-i": Fraction(3, 4),
           "omega": Fraction(1, 3), "w3": Fraction(1, 3)}


def parse_y(text) -> Fraction | None:
    """'symbolic' -> None; '-1', 'i', 'omega', 'e(p/q)' or a bare 'p/q' exponent -> z with y = e^{2 pi i z}."""
    if text is None:
        return None
    if isinstance(text, Fraction):
        return frac01(text)
    s = str(text).strip().replace(" ", "")
    if s in ("symbolic", "y"):
        return None
    if s in NAMED_Y:
        return NAMED_Y[s]
    if s.startswith("e(") and s.endswith(")"):
        s = s[2:-1]
    try:
        return frac01(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise ArithmeticPreconditionError(f"cannot read y value {text!r}") from None


def level_guard(model: OrbifoldModel, z, what="y"):
    if z is None:
        return
    N = Fraction(z).denominator
    if model.level and model.level % N:
        raise LevelError(f"{what} = e(2 pi i {z}) is a primitive {N}-th root of unity; "
                         f"level {model.level} of {model.name} is not divisible by {N}")


# rigidity --------------------------------------------------------------------
@dataclass
class RigidityEntry:
    q: Fraction
    verdict: str
    u_span: Fraction = Fraction(0)
    den_degree: Fraction = Fraction(0)
    pole_u1: bool = False
    value: YUPoly | None = None

    def line(self):
        if self.verdict == "constant":
            return f"q^({self.q}): verdict: constant  value: {self.value}"
        if self.verdict == "zero":
            return f"q^({self.q}): verdict: zero"
        pole = " (pole u=1)" if self.pole_u1 else ""
        return f"q^({self.q}): verdict: residual{pole}  u-span {self.u_span}  den-degree {self.den_degree}"


@dataclass
class RigidityReport:
    model: str
    y: str
    entries: list = field(default_factory=list)

    @property
    def verdicts(self):
        return [e.verdict for e in self.entries]

    def all_constant(self) -> bool:
        return all(v in ("constant", "zero") for v in self.verdicts)

    def lines(self):
        return [e.line() for e in self.entries]


def _classify(q, raw, val):
    if raw.is_zero():
        return RigidityEntry(q, "zero")
    if val.is_laurent() and val.is_constant_in_u():
        return RigidityEntry(q, "constant", value=val)
    return RigidityEntry(q, "residual", val.u_span(), val.den_degree(), val.has_pole_at_u1(), val)


def check_rigidity(model, q_cutoff, y=None, twist="tangent", path="direct", enforce_level=False) -> RigidityReport:
    """Exact verdict per q-order.

    'zero' means the coefficient vanishes before y is specialized; a coefficient
    that only vanishes at the chosen y is 'constant' with value 0.
    """
    z = parse_y(y)
    if enforce_level:
        level_guard(model, z)
    raw = localization.equivariant_genus(model, q_cutoff, twist, path)
    spec = raw if z is None else raw.specialize_y(z)
    orders = set(raw.orders()) | {Fraction(k) for k in range(0, math.ceil(raw.cutoff)) if k < raw.cutoff}
    rep = RigidityReport(model.name, "symbolic" if z is None else f"exp(2 pi i {z})")
    for q in sorted(orders):
        rep.entries.append(_classify(q, raw[q], spec[q]))
    return rep


# anomaly identities -----------------------------------------------------------
@dataclass
class AnomalyReport:
    n: int | Fraction | None
    c1_balance: bool
    residuals: dict
    per_component_n: list

    def holds(self, name) -> bool:
        return all(r == 0 for r in self.residuals[name])

    def lines(self):
        out = [f"n: {'undefined' if self.n is None else self.n}", f"c1_balance: {self.c1_balance}"]
        for k, v in self.residuals.items():
            out.append(f"{k}: max |residual| {max((abs(x) for x in v), default=0)}")
        return out


def _pair_class(comp, vecs, deg):
    """Pair a degree-deg class (dict monomial -> coeff) against the functional in all ways."""
    d = comp.dim_c
    if deg > d or comp.zero_functional() or d == 0:
        return [Fraction(0)]
    out = []
    for m2 in top_monomials(comp.h2_rank, d - deg):
        tot = Fraction(0)
        for m, a in vecs.items():
            mm = tuple(x + y for x, y in zip(m, m2))
            tot += a * comp.intersection.get(mm, 0)
        out.append(tot)
    return out


def _linear(comp, lines, weight_fn):
    acc = {}
    for ln in lines:
        ln = comp.padded(ln)
        w = weight_fn(ln)
        for i, c in enumerate(ln.c1):
            if c:
                m = tuple(1 if j == i else 0 for j in range(comp.h2_rank))
                acc[m] = acc.get(m, 0) + w * c
    return acc


def _quadratic(comp, lines):
    acc = {}
    for ln in lines:
        ln = comp.padded(ln)
        for i, a in enumerate(ln.c1):
            for j, b in enumerate(ln.c1):
                if a and b:
                    m = [0] * comp.h2_rank
                    m[i] += 1
                    m[j] += 1
                    m = tuple(m)
                    acc[m] = acc.get(m, 0) + a * b
    return acc


def _sub(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return out


def check_anomaly(model: OrbifoldModel, twist="w") -> AnomalyReport:
    from .bundles import w_lines_for

    names = ("w2-x2", "vw-vx", "lh_lg", "lg_v", "lg2")
    res = {k: [] for k in names}
    ns, balance = [], True
    for comp in model.components:
        W = w_lines_for(comp, twist) if twist == "tangent" or comp.w_lines else []
        X = comp.tangent + comp.normal

        def tally(f):
            return sum((f(ln) for ln in W), Fraction(0)) - sum((f(ln) for ln in X), Fraction(0))

        res["w2-x2"] += _pair_class(comp, _sub(_quadratic(comp, W), _quadratic(comp, X)), 2)
        res["vw-vx"] += _pair_class(comp, _sub(_linear(comp, W, lambda l: l.v), _linear(comp, X, lambda l: l.v)), 1)
        res["lh_lg"].append(tally(lambda l: l.lambda_h * l.lambda_g))
        res["lg_v"].append(tally(lambda l: l.lambda_g * l.v))
        res["lg2"].append(tally(lambda l: l.lambda_g ** 2))
        ns.append(tally(lambda l: Fraction(l.v * l.v)))
        # scalar parts of the c1 balance, then the Chern part
        for f in (lambda l: l.lambda_g, lambda l: l.lambda_h, lambda l: Fraction(l.v)):
            if tally(f):
                balance = False
        c1 = _sub(_linear(comp, W, lambda l: 1), _linear(comp, X, lambda l: 1))
        if any(_pair_class(comp, c1, 1)):
            balance = False
    ok = all(all(r == 0 for r in v) for v in res.values())
    n = None
    if ok and len(set(ns)) <= 1:
        n = ns[0] if ns else Fraction(0)
        n = int(n) if n.denominator == 1 else n
    return AnomalyReport(n, balance, res, ns)


# SL2(Z) transport ----------------------------------------------------------------
def _elt_op(group, x, y, fx, fy):
    if isinstance(x, tuple):
        return tuple((fx * a + fy * b) % k for a, b, k in zip(x, y, group))
    return (fx * x + fy * y) % group[0]


def transport_pair(group, pair, A: SL2Matrix):
    """(h, g) -> (g^-c h^a, g^d h^-b)."""
    h, g = pair
    return _elt_op(group, h, g, A.a, -A.c), _elt_op(group, g, h, A.d, -A.b)


def sl2_transport(model: OrbifoldModel, A: SL2Matrix) -> OrbifoldModel:
    """Relabel commuting pairs and their line data by A.

    transport(transport(m, A), B) equals transport(m, A @ B).
    """
    if model.mode != "commuting_pair":
        raise ModelError("sl2_transport needs a commuting_pair model")
    if any(c.pair is None for c in model.components):
        raise ModelError("sl2_transport needs every component to carry its (h, g) pair")
    old = {}
    for c in model.components:
        old.setdefault(c.pair, []).append(c)
    comps, seen = [], set()
    for c in model.components:
        p2 = transport_pair(model.group, c.pair, A)
        seen.add(p2)
        lab = f"({p2[0]},{p2[1]})" if not isinstance(p2[0], tuple) else str(p2)
        nc = replace(c, label=lab, pair=p2,
                     tangent=[ln.transported(A) for ln in c.tangent],
                     normal=[ln.transported(A) for ln in c.normal],
                     w_lines=[ln.transported(A) for ln in c.w_lines])
        nc.tangent, nc.normal = _resplit(nc)
        comps.append(nc)
    if len(seen) != len(old):
        raise ModelError("transport is not a bijection on the declared pairs")
    for c in comps:
        if c.pair not in old:
            raise ModelError(f"transported pair {c.pair} is not a declared pair")
        if not any(_same_data(c, o) for o in old[c.pair]):
            raise ModelError(f"fixed-locus data of pair {c.pair} not preserved by transport")
    comps.sort(key=lambda c: str(c.pair))
    return model.with_components(comps)


def _resplit(c):
    lines = c.tangent + c.normal
    return [l for l in lines if l.kind == "tangent_fixed"], [l for l in lines if l.kind == "normal"]


def _same_data(a, b):
    key = lambda c: (c.dim_c, c.count, sorted(l.key() for l in c.normal), sorted(l.key() for l in c.w_lines))
    return key(a) == key(b)


# F^A ----------------------------------------------------------------------------
def _delta(model, twist):
    from .bundles import w_lines_for

    d = Fraction(1)
    for comp in model.components:
        for ln in w_lines_for(comp, twist):
            a = ln.lambda_h
            if a:
                d = min(d, a, 1 - a)
    return d


def _substitute_y(terms, z, c, d, cut):
    """y^(e) -> e(z d e) q^(c z e) applied to q -> YUPoly."""
    out = {}
    for n, P in terms.items():
        slices = {}
        for (y2, s), coef in P.num.items():
            slices.setdefault(y2, {})[(0, s)] = coef
        for y2, num in slices.items():
            e = Fraction(y2) / 2
            qe = n + c * z * e
            if qe >= cut:
                continue
            M = lcm(P.M, (z * d * e).denominator)
            ph = CycloRat.exp2pii(z * d * e, M)
            piece = YUPoly({k: v.embed(M) * ph for k, v in num.items()},
                           {i: x.embed(M) for i, x in enumerate(P.den)}, M)
            out[qe] = out[qe] + piece if qe in out else piece
    return out


def build_FA(model: OrbifoldModel, A: SL2Matrix, q_cutoff, y, twist="tangent") -> GenusSeries:
    """Sector sum of y^(m/2-F) Ind(D (x) K_W^(cz) (x) Theta^((c tau + d) z)), y = e(z).

    The global character u^(c z v0) of the reference component is divided out
    so the K-factor has half-integral u-weights; theta-prefactors are not applied.
    """
    from .bundles import w_lines_for

    z = parse_y(y)
    if z is None:
        raise ArithmeticPreconditionError("build_FA needs y specialized to a root of unity")
    level_guard(model, z)
    Q = Fraction(q_cutoff)
    c, d = A.c, A.d
    cz = c * z
    delta = _delta(model, twist)
    if abs(cz) >= delta:
        raise ArithmeticPreconditionError(f"|c z| = {abs(cz)} must be below {delta} for a q-expansion bounded below")
    m = model.dim_c if twist == "tangent" else model.rank_w
    from .bundles import fermionic_shift

    P = max((abs(Fraction(m, 2) - fermionic_shift(cp, twist)) for cp in model.components), default=Fraction(0))
    Qp = (Q + abs(cz) * (m + P)) / (1 - abs(cz) / delta)
    _, D = model.context()
    Qp = Fraction(math.ceil(Qp * D) + 1, D)
    v0 = None
    total = {}
    for comp in model.components:
        W = w_lines_for(comp, twist)
        sv = sum(ln.v for ln in W)
        if v0 is None:
            v0 = sv
        ue = cz * (sv - v0)
        if (2 * ue).denominator != 1:
            raise LevelError(f"{comp.label}: K_W^(cz) has u-weight {ue}, not defined at this level")

        def extra(cp, ctx, W=W):
            acc = [Fraction(0)] * cp.h2_rank
            for ln in W:
                for i, x in enumerate(cp.padded(ln).c1):
                    acc[i] += x
            return Tower.exp_linear(ctx, acc, cz)

        coeffs = component_contribution(model, comp, Qp, twist, "elliptic", "direct",
                                        extra if comp.dim_c and cz else None)
        sub = _substitute_y(coeffs, z, c, d, Q)
        k = YUPoly.monomial(0, ue)
        w = comp.weight * comp.count
        for e, val in sub.items():
            val = (val * k).scale(w)
            total[e] = total[e] + val if e in total else val
    M, _ = model.context()
    meta = {"genus": "F^A", "A": f"({A.a} {A.b}; {A.c} {A.d})", "y": f"exp(2 pi i {z})",
            "u_normalization": f"u^(-c z v0), v0 = {v0}", "theta_prefactor": "not applied"}
    return GenusSeries(total, Q, meta, M)


def tau_shift_phase(series: GenusSeries, n=1) -> GenusSeries:
    """q^e -> e(n e) q^e: the effect of tau -> tau + n on a q-expansion."""
    terms = {}
    for e, P in series.items():
        M = lcm(P.M, (n * e).denominator)
        ph = CycloRat.exp2pii(n * e, M)
        terms[e] = YUPoly({k: v.embed(M) * ph for k, v in P.num.items()}, {i: x.embed(M) for i, x in enumerate(P.den)}, M)
    return GenusSeries(terms, series.cutoff, series.meta, series.M)


# numeric scans -----------------------------------------------------------------
@dataclass
class HoloReport:
    passed: bool
    near_poles: list
    max_abs: float
    samples: int

    def lines(self):
        out = [f"holomorphic: {'pass' if self.passed else 'FAIL'}", f"max |value|: {self.max_abs:.6g}",
               f"samples: {self.samples}"]
        for q, t in self.near_poles:
            out.append(f"near pole: q^({q}) at t = {t:.6g}")
        return out


def scan_holomorphicity(series, t_grid=None, tau_samples=(1.2j,), tol=1e-6, z=0.0) -> HoloReport:
    """Real-t scan: reduced denominators stay above tol and the truncated sum stays finite."""
    if t_grid is None:
        t_grid = [k / 64 for k in range(64)]
    terms = series.items() if isinstance(series, GenusSeries) else sorted(series.items())
    poles = []
    for q, P in terms:
        for t in P.pole_points(t_grid, tol):
            poles.append((q, t))
    max_abs = 0.0
    if not poles:
        for tau in tau_samples:
            for t in t_grid:
                val = sum(P.evaluate_zt(z, t) * cmath.exp(2j * cmath.pi * complex(q) * tau) for q, P in terms)
                max_abs = max(max_abs, abs(val))
    ok = not poles and math.isfinite(max_abs)
    return HoloReport(ok, poles, max_abs, len(t_grid) * len(tau_samples))


def _theta_prime0(tau, K):
    q = cmath.exp(2j * cmath.pi * tau)
    c = 1
    for k in range(1, K + 1):
        c *= 1 - q**k
    return 2 * cmath.pi * cmath.exp(1j * cmath.pi * tau / 4) * c**3


def numeric_F(model: OrbifoldModel, t, tau, z, A: SL2Matrix | None = None, twist="tangent", K=50, n=0):
    """theta'(0)^l / theta(z(c tau+d))^m times the transported sector sum (point components only).

    A = None is the plain F(t, tau, z).
    """
    from .bundles import w_lines_for

    A = A or SL2Matrix.identity()
    c, d = A.c, A.d
    ct = c * tau + d
    l = model.dim_c
    m = l if twist == "tangent" else model.rank_w
    total = 0
    for comp in model.components:
        if comp.dim_c and comp.zero_functional():
            continue
        if comp.dim_c:
            raise ArithmeticPreconditionError(f"{comp.label}: numeric evaluation covers point components only")
        val = 1
        for ln in w_lines_for(comp, twist):
            ln2 = ln.transported(A)
            arg = float(ln2.lambda_g) - tau * float(ln2.lambda_h) + z * ct + t * ln.v
            val *= cmath.exp(2j * cmath.pi * c * z * t * ln.v) * cmath.exp(-2j * cmath.pi * z * ct * float(ln2.lambda_h))
            val *= theta_eval_numeric("theta", arg, tau, K)
        for ln in comp.normal:
            ln2 = ln.transported(A)
            arg = float(ln2.lambda_g) - tau * float(ln2.lambda_h) + t * ln.v
            val /= theta_eval_numeric("theta", arg, tau, K)
        total += float(comp.weight * comp.count) * val
    pref = _theta_prime0(tau, K) ** l / theta_eval_numeric("theta", z * ct, tau, K) ** m
    return pref * total


@dataclass
class ModularityReport:
    generator: str
    max_residual: float
    passed: bool
    samples: int

    def lines(self):
        return [f"generator {self.generator}: max relative residual {self.max_residual:.3e} "
                f"({'pass' if self.passed else 'FAIL'}, {self.samples} samples)"]


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _lattice_weight(model, z):
    """Sum of normal weights; the lattice phase must agree on every component."""
    svs = {sum(ln.v for ln in c.normal) for c in model.components}
    sv = min(svs)
    for other in svs:
        if abs(cmath.exp(4j * cmath.pi * z * (other - sv)) - 1) > 1e-12:
            raise ArithmeticPreconditionError(
                f"lattice phases differ between components at z = {z}; pick z with c1 level compatibility")
    return sv


def check_modularity_numeric(model, generator="T", samples=None, tol=1e-9, z=0.5, twist="tangent", K=50):
    """Compare F at transformed arguments with the phase-multiplied original.

    T: F(t, tau+1) = F^T(t, tau).  S: F(t/tau, -1/tau) = tau^l e(n t^2 / 2 tau) F^S(t, tau).
    lattice: F(t + 2 tau + 2, tau) = e(-2 z sum v dim N_v) F(t, tau).
    """
    if samples is None:
        samples = [(0.13 + 0.02j, 0.21 + 1.1j), (0.37, -0.3 + 0.9j), (0.71 - 0.05j, 0.4 + 1.4j)]
    if not model.components:
        return ModularityReport(generator, 0.0, True, len(samples))
    l = model.dim_c
    n = 0
    if twist != "tangent":
        n = check_anomaly(model, twist).n or 0
    worst = 0.0
    for t, tau in samples:
        if generator == "T":
            lhs = numeric_F(model, t, tau + 1, z, twist=twist, K=K)
            rhs = numeric_F(model, t, tau, z, SL2Matrix.T(), twist, K)
        elif generator == "S":
            lhs = numeric_F(model, t / tau, -1 / tau, z, twist=twist, K=K)
            rhs = tau**l * cmath.exp(1j * cmath.pi * n * t * t / tau) * numeric_F(model, t, tau, z, SL2Matrix.S(), twist, K)
        elif generator == "lattice":
            sv = _lattice_weight(model, z)
            lhs = numeric_F(model, t + 2 * tau + 2, tau, z, twist=twist, K=K)
            rhs = cmath.exp(-2j * cmath.pi * z * 2 * sv) * numeric_F(model, t, tau, z, twist=twist, K=K)
        else:
            raise ValueError(f"unknown generator {generator!r}")
        worst = max(worst, _rel(lhs, rhs))
    return ModularityReport(generator, worst, worst < tol, len(samples))
