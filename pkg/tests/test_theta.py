import cmath
import random
from fractions import Fraction

import pytest

from orbigenus.errors import ArithmeticPreconditionError, DomainError, ReductionRequiredError
from orbigenus.rings.cyclo import CycloRat
from orbigenus.rings.tower import TowerContext
from orbigenus.theta import (ArgSpec, SL2Matrix, quasi_periodicity_check, quasi_reduce, theta3_triple_product_check,
                             theta_eval_numeric, theta_prime_zero, theta_series, transformation_residuals)

CTX = TowerContext(M=4, D=8)
I = CycloRat.i(4)


def jacobi_sum(cut):
    """-i sum (-1)^n q^{(n+1/2)^2/2} u^{n+1/2}: independent oracle for theta(t)."""
    out = {}
    for n in range(-10, 10):
        e = Fraction((2 * n + 1) ** 2, 8)
        if e < cut:
            out[(e, Fraction(2 * n + 1, 2))] = -I * (1 if n % 2 == 0 else -1)
    return out


def test_theta_matches_jacobi_sum():
    cut = 5
    th = theta_series(ArgSpec(v=1), "theta", cut, CTX)
    oracle = jacobi_sum(cut)
    for (e, s), c in oracle.items():
        assert th.coefficient(q=e, u=s) == c
    assert len(th.terms) == len(oracle)


def test_theta_odd_shift_by_one():
    # theta(t + 1) = -theta(t)
    a = theta_series(ArgSpec(v=1, alpha=1), "theta", 4, CTX)
    b = theta_series(ArgSpec(v=1), "theta", 4, CTX)
    assert a == b.scale(-1)


def test_theta_prime_zero_leading_terms():
    p = theta_prime_zero(2)
    assert p.grade == 1
    # theta'(0) / (2 pi i) = -i q^{1/8} + 3i q^{9/8} + ...
    assert p.coefficient(q=Fraction(1, 8)) == CycloRat.rational(-1, 4, grade=1) * I
    assert p.coefficient(q=Fraction(9, 8)) == CycloRat.rational(3, 4, grade=1) * I


def test_triple_product_q10():
    assert theta3_triple_product_check(10)


@pytest.mark.parametrize("k,a,b", [(1, 2, 0), (1, 2, 2), (2, 2, 0)])
def test_quasi_periodicity(k, a, b):
    assert quasi_periodicity_check(k, a, b, 8)


def test_quasi_odd_a_refused():
    with pytest.raises(ArithmeticPreconditionError):
        quasi_reduce(ArgSpec(nil=(1,)), 1, 1, 0, TowerContext(M=4, D=8, ngens=1, max_degree=1))


def test_unreduced_argument_refused():
    with pytest.raises(ReductionRequiredError):
        theta_series(ArgSpec(v=1, beta=1), "theta", 3, CTX)


def test_numeric_domain():
    with pytest.raises(DomainError):
        theta_eval_numeric("theta", 0.1, -1j)


def test_numeric_matches_exact_expansion():
    tau, t = 0.1 + 1.3j, 0.27
    th = theta_series(ArgSpec(v=1), "theta", 6, CTX)
    exact = th.evaluate(tau, 1, cmath.exp(1j * cmath.pi * t))
    assert abs(exact - theta_eval_numeric("theta", t, tau)) < 1e-12


def test_transformation_laws_random_points():
    rng = random.Random(11)
    for _ in range(20):
        t = complex(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3))
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0))
        res = transformation_residuals(t, tau, 50)
        assert set(res) == {"t+1", "t+tau", "S", "T"}
        assert max(res.values()) < 1e-9


def test_sl2_matrix():
    S, T = SL2Matrix.S(), SL2Matrix.T()
    assert S @ S == SL2Matrix(-1, 0, 0, -1)
    assert SL2Matrix.parse("1 1 0 1") == T
    with pytest.raises(ArithmeticPreconditionError):
        SL2Matrix(1, 1, 1, 1)
