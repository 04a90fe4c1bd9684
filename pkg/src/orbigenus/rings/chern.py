"""Truncated polynomials in degree-2 classes (nilpotent Chern data).

Generators are H^2 basis classes of one fixed component; monomials of
total degree above ``max_degree`` (the complex dimension) vanish.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from ..errors import ModelIncompleteError, NotNilpotentError


class ChernPoly:
    __slots__ = ("gens", "terms", "max_degree")

    def __init__(self, gens, terms=None, max_degree: int = 0):
        self.gens = tuple(gens)
        self.max_degree = max_degree
        out = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != len(self.gens):
                raise ValueError(f"monomial {mono} does not match generators {self.gens}")
            if sum(mono) <= max_degree and c != 0:
                out[mono] = c
        self.terms = out

    @classmethod
    def const(cls, gens, c, max_degree: int = 0) -> "ChernPoly":
        return cls(gens, {(0,) * len(gens): c}, max_degree)

    @classmethod
    def gen(cls, gens, name, max_degree: int = 0) -> "ChernPoly":
        gens = tuple(gens)
        mono = tuple(1 if g == name else 0 for g in gens)
        return cls(gens, {mono: Fraction(1)}, max_degree)

    @classmethod
    def linear(cls, gens, coeffs, max_degree: int = 0) -> "ChernPoly":
        """sum_i coeffs[i] * gens[i] -- the root of a line with those c1 coordinates."""
        n = len(gens)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                mono = [0] * n
                mono[i] = 1
                terms[tuple(mono)] = Fraction(c)
        return cls(gens, terms, max_degree)

    def _zero(self):
        return (0,) * len(self.gens)

    def constant_term(self):
        return self.terms.get(self._zero(), 0)

    def degree_part(self, d: int) -> "ChernPoly":
        return ChernPoly(self.gens, {m: c for m, c in self.terms.items() if sum(m) == d}, self.max_degree)

    def _check(self, other):
        if isinstance(other, ChernPoly):
            if other.gens != self.gens or other.max_degree != self.max_degree:
                raise ValueError("ChernPoly operands live over different components")
            return other
        return ChernPoly.const(self.gens, other, self.max_degree)

    def __add__(self, other):
        other = self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return ChernPoly(self.gens, terms, self.max_degree)

    __radd__ = __add__

    def __neg__(self):
        return ChernPoly(self.gens, {m: -c for m, c in self.terms.items()}, self.max_degree)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ChernPoly):
            return ChernPoly(self.gens, {m: c * other for m, c in self.terms.items()}, self.max_degree)
        other = self._check(other)
        terms = {}
        for ma, ca in self.terms.items():
            da = sum(ma)
            for mb, cb in other.terms.items():
                if da + sum(mb) > self.max_degree:
                    continue
                m = tuple(x + y for x, y in zip(ma, mb))
                p = ca * cb
                terms[m] = terms[m] + p if m in terms else p
        return ChernPoly(self.gens, terms, self.max_degree)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ChernPoly.const(self.gens, 1, self.max_degree)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ChernPoly):
            other = self._check(other)
        a = {m: c for m, c in self.terms.items() if c != 0}
        b = {m: c for m, c in other.terms.items() if c != 0}
        return a == b

    __hash__ = None

    def __repr__(self):
        return f"ChernPoly({self.gens}, {self.terms}, max_degree={self.max_degree})"

    def compose_series(self, coeffs) -> "ChernPoly":
        """sum_k coeffs[k] * self^k for a nilpotent self (coeffs beyond max_degree ignored)."""
        out = ChernPoly(self.gens, {}, self.max_degree)
        power = ChernPoly.const(self.gens, 1, self.max_degree)
        for k, a in enumerate(coeffs):
            if k > self.max_degree:
                break
            if a:
                out = out + power * a
            power = power * self
        return out

    def integrate(self, functional) -> object:
        """Apply an intersection functional to the top-degree part."""
        total = 0
        for m, c in self.terms.items():
            if sum(m) != self.max_degree:
                continue
            if m not in functional:
                raise ModelIncompleteError(f"intersection functional has no value for monomial {m}")
            total = total + c * functional[m]
        return total


def chern_exp(x: ChernPoly) -> ChernPoly:
    """Truncated exponential of a nilpotent class."""
    c0 = x.constant_term()
    if c0 != 0:
        raise NotNilpotentError(f"exp needs a nilpotent argument; constant term is {c0}")
    return x.compose_series([Fraction(1, factorial(k)) for k in range(x.max_degree + 1)])
