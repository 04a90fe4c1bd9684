"""Truncated Puiseux series in q with generic coefficients.

Exponents are rationals; ``cutoff`` is exclusive (None means the series is
an exact finite sum).  Multiplying series with cutoffs c1, c2 and support
floors f1, f2 is reliable below min(c1 + f2, c2 + f1).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _add_cut(c, f):
    return None if c is None else c + f


def _min_cut(*cs):
    cs = [c for c in cs if c is not None]
    return min(cs) if cs else None


class QSeries:
    __slots__ = ("terms", "cutoff")

    def __init__(self, terms=None, cutoff=None):
        self.cutoff = None if cutoff is None else Fraction(cutoff)
        out = {}
        for e, c in (terms or {}).items():
            e = Fraction(e)
            if self.cutoff is not None and e >= self.cutoff:
                continue
            if c != 0:
                out[e] = c
        self.terms = out

    @property
    def floor(self):
        return min(self.terms) if self.terms else self.cutoff

    @property
    def denom(self) -> int:
        d = 1
        for e in self.terms:
            d = d * e.denominator // gcd(d, e.denominator)
        return d

    @classmethod
    def monomial(cls, e, c=1, cutoff=None):
        return cls({Fraction(e): c}, cutoff)

    def __getitem__(self, e):
        e = Fraction(e)
        if self.cutoff is not None and e >= self.cutoff:
            raise KeyError(f"q^{e} lies beyond the validity cutoff {self.cutoff}")
        return self.terms.get(e, 0)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries({0: other})
        cut = _min_cut(self.cutoff, other.cutoff)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return QSeries(terms, cut)

    __radd__ = __add__

    def __neg__(self):
        return QSeries({e: -c for e, c in self.terms.items()}, self.cutoff)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return QSeries({e: c * other for e, c in self.terms.items()}, self.cutoff)
        return qser_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = QSeries({0: 1})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        cut = _min_cut(self.cutoff, other.cutoff)
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(e, 0) == other.terms.get(e, 0) for e in keys if cut is None or e < cut)

    __hash__ = None

    def truncate(self, cutoff) -> "QSeries":
        return QSeries(self.terms, _min_cut(self.cutoff, Fraction(cutoff)))

    def __repr__(self):
        body = " + ".join(f"{c}*q^({e})" for e, c in sorted(self.terms.items()))
        return f"QSeries({body or 0}; cutoff={self.cutoff})"


def qser_mul(a: QSeries, b: QSeries) -> QSeries:
    fa = a.floor if a.terms else Fraction(0)
    fb = b.floor if b.terms else Fraction(0)
    cut = _min_cut(_add_cut(a.cutoff, fb), _add_cut(b.cutoff, fa))
    terms = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = ea + eb
            if cut is not None and e >= cut:
                continue
            p = ca * cb
            terms[e] = terms[e] + p if e in terms else p
    return QSeries(terms, cut)


def euler_product(order, power: int = 1) -> QSeries:
    """prod_{k>=1} (1 - q^k)^power, valid below q^(order+1)."""
    cut = Fraction(order) + 1
    out = QSeries({0: 1}, cut)
    for k in range(1, int(order) + 1):
        if power >= 0:
            f = QSeries({0: 1, k: -1})
        else:
            # 1/(1 - q^k) as a geometric series
            f = QSeries({k * j: 1 for j in range(int(cut) // k + 1)}, cut)
        for _ in range(abs(power)):
            out = out * f
    return out
