"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(M)-1),
reduced modulo the M-th cyclotomic polynomial, so equality is
coefficient-wise.  Each element also carries an integer grade that
counts formal factors of 2*pi*i.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

from ..errors import GradeError, MalformedScalarError


def lcm(*args: int) -> int:
    out = 1
    for a in args:
        out = out * a // gcd(out, a)
    return out


def _polydiv_int(num, den):
    # exact division of integer polynomials, den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert not any(num[: len(den) - 1]), "inexact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(M: int) -> tuple:
    """Integer coefficients of Phi_M, lowest degree first."""
    if M < 1:
        raise MalformedScalarError(f"cyclotomic order must be >= 1, got {M}")
    p = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            p = _polydiv_int(p, cyclotomic_poly(d))
    return tuple(p)


def totient(M: int) -> int:
    return len(cyclotomic_poly(M)) - 1


@lru_cache(maxsize=None)
def power_table(M: int) -> tuple:
    """Row j holds zeta_M^j (0 <= j < M) in the power basis."""
    phi = totient(M)
    poly = cyclotomic_poly(M)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(M):
        rows.append(tuple(cur))
        # multiply by zeta and reduce the overflow with Phi_M (monic)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * poly[i]
    return tuple(rows)


def cyclo_reduce(raw, M: int, grade: int = 0) -> "CycloRat":
    """Canonical element for sum_j raw[j] * zeta_M^j (any length)."""
    raw = list(raw)
    if not raw:
        raise MalformedScalarError("empty coefficient vector")
    if M < 1:
        raise MalformedScalarError(f"cyclotomic order must be >= 1, got {M}")
    table = power_table(M)
    out = [Fraction(0)] * totient(M)
    for j, c in enumerate(raw):
        if c:
            for i, t in enumerate(table[j % M]):
                if t:
                    out[i] += c * t
    return CycloRat(M, out, grade, _trusted=True)


def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _pdivmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    inv = 1 / Fraction(b[-1])
    while len(_trim(a)) >= len(b):
        c = a[-1] * inv
        k = len(a) - len(b)
        q[k] = c
        for j, bj in enumerate(b):
            a[k + j] -= c * bj
    return q, a


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _psub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


class CycloRat:
    """Element of Q(zeta_M) with a formal (2*pi*i)-grade."""

    __slots__ = ("M", "c", "grade")
    __hash__ = None

    def __init__(self, M: int, coeffs, grade: int = 0, _trusted: bool = False):
        if _trusted:
            self.M = M
            self.c = tuple(coeffs)
            self.grade = grade
            return
        red = cyclo_reduce(coeffs, M, grade)
        self.M, self.c, self.grade = red.M, red.c, red.grade

    # constructors -----------------------------------------------------
    @classmethod
    def rational(cls, x, M: int = 1, grade: int = 0) -> "CycloRat":
        c = [Fraction(0)] * totient(M)
        c[0] = Fraction(x)
        return cls(M, c, grade, _trusted=True)

    @classmethod
    def zeta(cls, M: int, k: int = 1) -> "CycloRat":
        return cls(M, power_table(M)[k % M], 0, _trusted=True)

    @classmethod
    def exp2pii(cls, lam, M: int | None = None) -> "CycloRat":
        """exp(2*pi*i*lam) for rational lam, in context M (default: denominator)."""
        lam = Fraction(lam)
        if M is None:
            M = lam.denominator
        k = lam * M
        if k.denominator != 1:
            raise MalformedScalarError(f"exp(2 pi i {lam}) does not live in Q(zeta_{M})")
        return cls.zeta(M, int(k))

    @classmethod
    def i(cls, M: int = 4) -> "CycloRat":
        return cls.exp2pii(Fraction(1, 4), M)

    # context handling -------------------------------------------------
    def embed(self, M2: int) -> "CycloRat":
        if M2 == self.M:
            return self
        if M2 % self.M:
            raise MalformedScalarError(f"cannot embed Q(zeta_{self.M}) into Q(zeta_{M2})")
        step = M2 // self.M
        raw = [Fraction(0)] * M2
        for j, x in enumerate(self.c):
            raw[j * step] = x
        return cyclo_reduce(raw, M2, self.grade)

    def restrict(self, M1: int) -> "CycloRat":
        """Inverse of embed; raises ValueError if not in the subfield."""
        if self.M % M1:
            raise MalformedScalarError(f"Q(zeta_{M1}) is not a subfield of Q(zeta_{self.M})")
        phi1 = totient(M1)
        cols = [CycloRat.zeta(M1, j).embed(self.M).c for j in range(phi1)]
        n = len(self.c)
        # Gaussian elimination on the augmented system cols * x = self.c
        rows = [[Fraction(cols[j][i]) for j in range(phi1)] + [self.c[i]] for i in range(n)]
        piv_cols = []
        r = 0
        for col in range(phi1):
            p = next((k for k in range(r, n) if rows[k][col] != 0), None)
            if p is None:
                continue
            rows[r], rows[p] = rows[p], rows[r]
            inv = 1 / rows[r][col]
            rows[r] = [x * inv for x in rows[r]]
            for k in range(n):
                if k != r and rows[k][col] != 0:
                    f = rows[k][col]
                    rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
            piv_cols.append(col)
            r += 1
        if any(rows[k][-1] != 0 for k in range(r, n)):
            raise ValueError(f"element does not lie in Q(zeta_{M1})")
        x = [Fraction(0)] * phi1
        for k, col in enumerate(piv_cols):
            x[col] = rows[k][-1]
        return CycloRat(M1, x, self.grade, _trusted=True)

    def minimal_context(self) -> "CycloRat":
        for d in range(1, self.M + 1):
            if self.M % d == 0:
                try:
                    return self.restrict(d)
                except ValueError:
                    continue
        return self

    def _coerce(self, other):
        if isinstance(other, CycloRat):
            if other.M == self.M:
                return self, other
            M = lcm(self.M, other.M)
            return self.embed(M), other.embed(M)
        if isinstance(other, (int, Fraction)):
            return self, CycloRat.rational(other, self.M, self.grade if other == 0 else 0)
        return None, None

    # arithmetic -------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.c)

    def _grade_for_sum(self, other):
        if self.is_zero():
            return other.grade
        if other.is_zero():
            return self.grade
        if self.grade != other.grade:
            raise GradeError(f"adding elements of 2*pi*i-grade {self.grade} and {other.grade}")
        return self.grade

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return CycloRat(a.M, [x + y for x, y in zip(a.c, b.c)], a._grade_for_sum(b), _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return CycloRat(self.M, [-x for x in self.c], self.grade, _trusted=True)

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloRat(self.M, [x * other for x in self.c], self.grade, _trusted=True)
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        if len(a.c) == 1:
            return CycloRat(a.M, [a.c[0] * b.c[0]], a.grade + b.grade, _trusted=True)
        raw = [Fraction(0)] * (2 * len(a.c) - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        raw[i + j] += x * y
        return cyclo_reduce(raw, a.M, a.grade + b.grade)

    __rmul__ = __mul__

    def inverse(self) -> "CycloRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        phi = [Fraction(x) for x in cyclotomic_poly(self.M)]
        a = _trim(list(self.c))
        # extended Euclid: track s with s*a = r (mod phi)
        r0, r1 = phi, a
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _pdivmod(r0, r1)
            r0, r1 = r1, _trim(rem)
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        inv_c = 1 / r1[0]
        return CycloRat(self.M, [x * inv_c for x in s1] or [Fraction(0)], -self.grade)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CycloRat.rational(1, self.M)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        if a.is_zero() and b.is_zero():
            return True
        return a.c == b.c and a.grade == b.grade

    def conjugate(self) -> "CycloRat":
        raw = [Fraction(0)] * self.M
        for j, x in enumerate(self.c):
            raw[(-j) % self.M] += x
        return cyclo_reduce(raw, self.M, self.grade)

    # inspection -------------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.c[0]

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.M)
        return sum(complex(float(x)) * z**j for j, x in enumerate(self.c))

    def __repr__(self):
        return f"CycloRat({self.M}, {self})"

    def __str__(self):
        if self.is_rational():
            return str(self.c[0])
        parts = []
        for j, x in enumerate(self.c):
            if x:
                parts.append(f"{x}" if j == 0 else f"{x}*z{self.M}^{j}")
        return "(" + " + ".join(parts) + ")"
