"""Laurent polynomials in y^(1/2) over rational functions in u^(1/2).

A YUPoly is ``num / den``: ``num`` maps ``(2*y_exp, 2*u_exp)`` to a
cyclotomic coefficient, ``den`` is a y-free polynomial in ``s = u^(1/2)``
with nonzero constant term and leading coefficient 1, coprime to every
y-slice of the numerator.  That canonical form makes equality and the
constancy-in-u test exact.
"""

from __future__ import annotations

from fractions import Fraction

from . import upoly
from .cyclo import CycloRat, lcm
from ..errors import ArithmeticPreconditionError


def _frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _scalar_str(c: CycloRat) -> str:
    if c.is_rational():
        return str(c.c[0])
    return str(c)


class YUPoly:
    __slots__ = ("M", "num", "den")
    __hash__ = None

    def __init__(self, num=None, den=None, M: int = 1, _canonical: bool = False):
        num = dict(num or {})
        if den is None:
            den = {0: CycloRat.rational(1, M)}
        elif not isinstance(den, dict):
            den = {i: c for i, c in enumerate(den)}
        if _canonical:
            self.M, self.num, self.den = M, num, tuple(den[i] for i in range(len(den)))
            return
        self.M, self.num, self.den = _reduce(num, den, M)

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c, M: int = 1) -> "YUPoly":
        if not isinstance(c, CycloRat):
            c = CycloRat.rational(c, M)
        M = lcm(M, c.M)
        return cls({(0, 0): c.embed(M)}, M=M)

    @classmethod
    def monomial(cls, y_exp=0, u_exp=0, c=1, M: int = 1) -> "YUPoly":
        y2, u2 = Fraction(y_exp) * 2, Fraction(u_exp) * 2
        if y2.denominator != 1 or u2.denominator != 1:
            raise ArithmeticPreconditionError("y and u exponents must lie in (1/2)Z")
        if not isinstance(c, CycloRat):
            c = CycloRat.rational(c, M)
        M = lcm(M, c.M)
        return cls({(int(y2), int(u2)): c.embed(M)}, M=M)

    @classmethod
    def y(cls, e=1) -> "YUPoly":
        return cls.monomial(y_exp=e)

    @classmethod
    def u(cls, e=1) -> "YUPoly":
        return cls.monomial(u_exp=e)

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_laurent(self) -> bool:
        return len(self.den) == 1

    def is_constant_in_u(self) -> bool:
        return self.is_laurent() and all(s == 0 for (_, s) in self.num)

    def is_y_free(self) -> bool:
        return all(y2 == 0 for (y2, _) in self.num)

    def u_span(self) -> Fraction:
        """Degree span of the numerator in u (0 for constants)."""
        if not self.num:
            return Fraction(0)
        ss = [s for (_, s) in self.num]
        return Fraction(max(ss) - min(ss), 2)

    def den_degree(self) -> Fraction:
        return Fraction(len(self.den) - 1, 2)

    def has_pole_at_u1(self) -> bool:
        if self.is_laurent():
            return False
        one = CycloRat.rational(1, self.M)
        return upoly.exact_eval(list(self.den), one).is_zero() or upoly.exact_eval(list(self.den), -one).is_zero()

    def pole_points(self, ts, tol: float):
        """Real t values (u = e^{2 pi i t}) where |den| < tol.

        Both branches u^(1/2) = +-e^{pi i t} are checked; a hit on the second
        branch is reported as t + 1.
        """
        import cmath

        out = []
        for t in ts:
            for shift in (0, 1):
                s = cmath.exp(1j * cmath.pi * (t + shift))
                if abs(upoly.evaluate(list(self.den), s)) < tol:
                    out.append(t + shift)
        return out

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, YUPoly):
            return other
        if isinstance(other, (int, Fraction, CycloRat)):
            return YUPoly.const(other, self.M)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        M = lcm(self.M, other.M)
        if self.den == other.den or (self.is_laurent() and other.is_laurent()):
            num = _add_dicts(self.num, other.num, M)
            if self.is_laurent() and other.is_laurent():
                return YUPoly(num, [CycloRat.rational(1, M)], M, _canonical=True)
            return YUPoly(num, _den_dict(self.den), M)
        num = _add_dicts(_mul_num_den(self.num, other.den, M), _mul_num_den(other.num, self.den, M), M)
        den = upoly.mul(list(self.den), list(other.den))
        return YUPoly(num, den, M)

    __radd__ = __add__

    def __neg__(self):
        return YUPoly({k: -v for k, v in self.num.items()}, list(self.den), self.M, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        M = lcm(self.M, other.M)
        num = _mul_dicts(self.num, other.num, M)
        if self.is_laurent() and other.is_laurent():
            return YUPoly(num, [CycloRat.rational(1, M)], M, _canonical=True)
        den = upoly.mul(list(self.den), list(other.den))
        return YUPoly(num, den, M)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        if not other.is_y_free():
            raise ArithmeticPreconditionError("only y-free divisors are supported")
        M = lcm(self.M, other.M)
        # self.num/self.den * other.den/other.num, other.num = s^k * poly
        kmin = min(s for (_, s) in other.num)
        onum = {s - kmin: c for (_, s), c in other.num.items()}
        num = _mul_num_den(self.num, other.den, M)
        num = {(y2, s - kmin): c for (y2, s), c in num.items()}
        den = upoly.mul(list(self.den), [onum.get(i, CycloRat.rational(0, M)) for i in range(max(onum) + 1)])
        return YUPoly(num, den, M)

    def __pow__(self, n: int):
        out = YUPoly.const(1, self.M)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        M = lcm(self.M, other.M)
        if len(self.den) != len(other.den):
            return False
        if any(a.embed(M) != b.embed(M) for a, b in zip(self.den, other.den)):
            return False
        if set(self.num) != set(other.num):
            return False
        return all(self.num[k].embed(M) == other.num[k].embed(M) for k in self.num)

    # specialisation ---------------------------------------------------
    def specialize_y(self, z) -> "YUPoly":
        """Substitute y = exp(2 pi i z), with y^(1/2) = exp(pi i z)."""
        z = Fraction(z)
        M = lcm(self.M, (z / 2).denominator, *(Fraction(z * y2 / 2).denominator for (y2, _) in self.num))
        num = {}
        for (y2, s), c in self.num.items():
            ph = CycloRat.exp2pii(z * y2 / 2, M)
            key = (0, s)
            num[key] = num.get(key, CycloRat.rational(0, M)) + c.embed(M) * ph
        return YUPoly(num, _den_dict(self.den), M)

    def shift_y(self, e) -> "YUPoly":
        """Multiply by y^e for any rational e (keys then hold 2e exactly)."""
        d = Fraction(e) * 2
        d = int(d) if d.denominator == 1 else d
        num = {(_norm(y2 + d), s): c for (y2, s), c in self.num.items()}
        return YUPoly(num, list(self.den), self.M, _canonical=True)

    def scale(self, c) -> "YUPoly":
        c = Fraction(c)
        if c == 0:
            return YUPoly({}, None, self.M)
        return YUPoly({k: v * c for k, v in self.num.items()}, list(self.den), self.M, _canonical=True)

    def evaluate_zt(self, z: complex, t: complex) -> complex:
        """Value at y = e^{2 pi i z}, u = e^{2 pi i t} with y^e = e^{2 pi i e z}."""
        import cmath

        val = sum(c.to_complex() * cmath.exp(1j * cmath.pi * (z * y2 + t * s)) for (y2, s), c in self.num.items())
        return val / upoly.evaluate(list(self.den), cmath.exp(1j * cmath.pi * t))

    def scalar_at_u1(self) -> "YUPoly":
        """Value at u = 1 (u^(1/2) = 1); den(1) must be nonzero."""
        M = self.M
        d = upoly.exact_eval(list(self.den), CycloRat.rational(1, M))
        if d.is_zero():
            raise ArithmeticPreconditionError("rational function has a pole at u = 1")
        num = {}
        for (y2, _), c in self.num.items():
            num[(y2, 0)] = num.get((y2, 0), CycloRat.rational(0, M)) + c
        return YUPoly({k: v / d for k, v in num.items()}, M=M)

    def y_coefficients(self):
        """For u-free elements: y-exponent (Fraction) -> CycloRat."""
        if not self.is_laurent() or any(s for (_, s) in self.num):
            raise ArithmeticPreconditionError("element depends on u")
        return {Fraction(y2, 2): c for (y2, _), c in sorted(self.num.items())}

    def evaluate(self, y_half: complex, u_half: complex) -> complex:
        val = sum(c.to_complex() * y_half**y2 * u_half**s for (y2, s), c in self.num.items())
        return val / upoly.evaluate(list(self.den), u_half)

    def is_rational_valued(self) -> bool:
        return all(c.is_rational() for c in self.num.values()) and all(c.is_rational() for c in self.den)

    # formatting -------------------------------------------------------
    def terms_sorted(self):
        return sorted(self.num.items(), key=lambda kv: (-kv[0][0], -kv[0][1]))

    def _num_str(self):
        parts = []
        for (y2, s), c in self.terms_sorted():
            mono = []
            if y2:
                mono.append(f"y^({_frac_str(Fraction(y2, 2))})")
            if s:
                mono.append(f"u^({_frac_str(Fraction(s, 2))})")
            cs = _scalar_str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append("*".join(mono))
            elif cs == "-1":
                parts.append("-" + "*".join(mono))
            else:
                parts.append(cs + "*" + "*".join(mono))
        out = " + ".join(parts) if parts else "0"
        return out.replace("+ -", "- ")

    def _den_str(self):
        parts = []
        for s in range(len(self.den) - 1, -1, -1):
            c = self.den[s]
            if c.is_zero():
                continue
            cs = _scalar_str(c)
            mono = f"u^({_frac_str(Fraction(s, 2))})" if s else ""
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(cs + "*" + mono)
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        if self.is_laurent():
            return self._num_str()
        return f"({self._num_str()})/({self._den_str()})"

    def __repr__(self):
        return f"YUPoly({self})"

    def to_json(self) -> dict:
        def key(y2, s):
            k = f"y^({_frac_str(Fraction(y2, 2))})"
            if s:
                k += f"u^({_frac_str(Fraction(s, 2))})"
            return k

        out = {"num": {key(y2, s): _scalar_str(c) for (y2, s), c in self.terms_sorted()}}
        if not self.is_laurent():
            out["den"] = {f"u^({_frac_str(Fraction(s, 2))})": _scalar_str(c) for s, c in enumerate(self.den) if not c.is_zero()}
        return out


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def _den_dict(den):
    return {i: c for i, c in enumerate(den)}


def _add_dicts(a, b, M):
    out = {k: v.embed(M) for k, v in a.items()}
    for k, v in b.items():
        if k in out:
            s = out[k] + v.embed(M)
            if s.is_zero():
                del out[k]
            else:
                out[k] = s
        else:
            out[k] = v.embed(M)
    return out


def _mul_dicts(a, b, M):
    out = {}
    for (ya, sa), ca in a.items():
        ca = ca.embed(M)
        for (yb, sb), cb in b.items():
            k = (ya + yb, sa + sb)
            p = ca * cb.embed(M)
            out[k] = out[k] + p if k in out else p
    return {k: v for k, v in out.items() if not v.is_zero()}


def _mul_num_den(num, den, M):
    return _mul_dicts(num, {(0, s): c for s, c in enumerate(den) if not c.is_zero()}, M)


def _reduce(num, den, M):
    """Canonical (M, num, den) for num/den; den maps s-exponent -> scalar."""
    M = lcm(M, *(c.M for c in num.values()), *(c.M for c in den.values()))
    den = {s: c.embed(M) for s, c in den.items() if not c.is_zero()}
    if not den:
        raise ZeroDivisionError("zero denominator")
    num = {k: c.embed(M) for k, c in num.items() if not c.is_zero()}
    one = CycloRat.rational(1, M)
    if not num:
        return M, {}, (one,)
    k0 = min(den)
    P = [den.get(k0 + i, CycloRat.rational(0, M)) for i in range(max(den) - k0 + 1)]
    num = {(y2, s - k0): c for (y2, s), c in num.items()}
    slices = {}
    for (y2, s), c in num.items():
        slices.setdefault(y2, {})[s] = c
    if len(P) > 1:
        g = P
        polys = {}
        for y2, sl in slices.items():
            m = min(sl)
            polys[y2] = (m, [sl.get(m + i, CycloRat.rational(0, M)) for i in range(max(sl) - m + 1)])
        for _, (m, p) in polys.items():
            g = upoly.gcd(g, p)
            if len(g) == 1:
                break
        if len(g) > 1:
            P, _ = upoly.divmod_(P, g)
            num = {}
            for y2, (m, p) in polys.items():
                qp, _ = upoly.divmod_(p, g)
                for i, c in enumerate(qp):
                    if not c.is_zero():
                        num[(y2, m + i)] = c
        P = upoly.normalize(P, M)
        # keep the constant term nonzero
        while P and P[0].is_zero():
            P = P[1:]
            num = {(y2, s - 1): c for (y2, s), c in num.items()}
    lc = P[-1]
    if lc != one:
        inv = lc.inverse()
        P = [c * inv for c in P]
        num = {k: c * inv for k, c in num.items()}
    return M, num, tuple(P)


def u_ratfunc_reduce(num, den) -> YUPoly:
    """Reduce num/den where both map exponents to scalars.

    Keys are u-exponents, or ``(y_exp, u_exp)`` pairs for the numerator;
    exponents live in (1/2)Z.
    """

    def conv(d, allow_y):
        out = {}
        for k, c in d.items():
            if isinstance(k, tuple):
                if not allow_y and Fraction(k[0]) != 0:
                    raise ArithmeticPreconditionError("denominator must be y-free")
                y2, s = Fraction(k[0]) * 2, Fraction(k[1]) * 2
            else:
                y2, s = Fraction(0), Fraction(k) * 2
            if y2.denominator != 1 or s.denominator != 1:
                raise ArithmeticPreconditionError("exponents must lie in (1/2)Z")
            if not isinstance(c, CycloRat):
                c = CycloRat.rational(c)
            out[(int(y2), int(s))] = c
        return out

    n = conv(num, True)
    d = conv(den, False)
    if not any(not c.is_zero() for c in d.values()):
        raise ZeroDivisionError("zero denominator")
    M = lcm(1, *(c.M for c in list(n.values()) + list(d.values())))
    dmin = min(s for (_, s) in d)
    n = {(y2, s - dmin): c for (y2, s), c in n.items()}
    dd = {s - dmin: c for (_, s), c in d.items()}
    return YUPoly(n, dd, M)
