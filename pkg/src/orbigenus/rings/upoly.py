"""Dense univariate polynomials over Q(zeta_M), as lists low degree first."""

from __future__ import annotations

from .cyclo import CycloRat, lcm


def context_of(coeffs) -> int:
    return lcm(*(c.M for c in coeffs)) if coeffs else 1


def normalize(p, M=None):
    M = M or context_of(p)
    out = [c.embed(M) for c in p]
    while out and out[-1].is_zero():
        out.pop()
    return out


def add(a, b):
    M = context_of(a + b)
    a, b = normalize(a, M), normalize(b, M)
    n = max(len(a), len(b))
    zero = CycloRat.rational(0, M)
    return normalize([(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero) for i in range(n)], M)


def mul(a, b):
    if not a or not b:
        return []
    M = context_of(a + b)
    a, b = normalize(a, M), normalize(b, M)
    out = [CycloRat.rational(0, M) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return normalize(out, M)


def scale(a, c: CycloRat):
    return normalize([x * c for x in a])


def divmod_(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    M = context_of(a + b)
    a, b = normalize(a, M), normalize(b, M)
    if len(a) < len(b):
        return [], a
    inv = b[-1].inverse()
    q = [CycloRat.rational(0, M) for _ in range(len(a) - len(b) + 1)]
    r = list(a)
    while len(r) >= len(b):
        c = r[-1] * inv
        k = len(r) - len(b)
        q[k] = c
        for j, bj in enumerate(b):
            r[k + j] = r[k + j] - c * bj
        r = normalize(r, M)
    return normalize(q, M), r


def monic(a):
    if not a:
        return a
    return scale(a, a[-1].inverse())


def gcd(a, b):
    """Monic gcd by the Euclidean algorithm over the cyclotomic field."""
    a, b = normalize(a), normalize(b)
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return monic(a)


def evaluate(a, x: complex) -> complex:
    out = 0j
    for c in reversed(a):
        out = out * x + c.to_complex()
    return out


def exact_eval(a, x: CycloRat) -> CycloRat:
    out = CycloRat.rational(0, x.M)
    for c in reversed(a):
        out = out * x + c
    return out
