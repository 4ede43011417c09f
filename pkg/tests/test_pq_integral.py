import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pqszasz.pq_core import DomainError, NumericalFailure, PQParams, pq_integer
from pqszasz.pq_integral import (
    as_array_function,
    jackson_integrals,
    pq_integral_from_zero,
    pq_integral_interval,
)

P = PQParams(0.95, 0.9)


def test_constant_and_linear_examples():
    assert pq_integral_from_zero(lambda t: np.ones_like(t), 1.0, P) == pytest.approx(1.0, rel=1e-13)
    assert pq_integral_from_zero(lambda t: t, 1.0, P) == pytest.approx(1 / 1.85, rel=1e-13)


def test_classical_square():
    val = pq_integral_from_zero(lambda t: t * t, 2.0, PQParams.classical_point())
    assert val == pytest.approx(8.0 / 3.0, rel=1e-13)


def test_interval_of_one_is_endpoint_difference():
    val = pq_integral_interval(lambda t: np.ones_like(t), 1.0, 2.0, P)
    assert val == pytest.approx(1.0, rel=1e-13)


def test_empty_and_reversed_intervals():
    assert pq_integral_interval(np.exp, 1.5, 1.5, P) == 0.0
    assert pq_integral_from_zero(np.exp, 0.0, P) == 0.0
    with pytest.raises(DomainError):
        pq_integral_interval(np.exp, 2.0, 1.0, P)
    with pytest.raises(DomainError):
        pq_integral_from_zero(np.exp, -1.0, P)
    with pytest.raises(DomainError):
        pq_integral_from_zero(np.exp, 1.0, P, tol=0.0)


@pytest.mark.parametrize("m", range(7))
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_monomial_law(m, a):
    val = pq_integral_from_zero(lambda t: t**m, a, P)
    assert val == pytest.approx(a ** (m + 1) / pq_integer(m + 1, P), rel=1e-12)


@pytest.mark.parametrize("p,q", [(0.95, 0.9), (1.0, 0.5), (0.99, 0.98)])
def test_exponential_against_oracle(p, q):
    params = PQParams(p, q)
    ref = oracles.jackson(mp.exp, 1.3, p, q, terms=4000)
    assert pq_integral_from_zero(np.exp, 1.3, params) == pytest.approx(float(ref), rel=1e-12)


def test_scalar_only_callable_is_accepted():
    def scalar(t):
        return math.cos(t)
    val = pq_integral_from_zero(scalar, 1.0, P)
    assert val == pytest.approx(pq_integral_from_zero(np.cos, 1.0, P), rel=1e-14)
    assert as_array_function(scalar)(np.array([0.0, 1.0])).shape == (2,)


def test_node_budget_exhaustion():
    tight = PQParams(1.0, 1.0 - 1e-9)
    with pytest.raises(NumericalFailure):
        pq_integral_from_zero(np.exp, 1.0, tight)


def test_non_finite_integrand():
    with pytest.raises(NumericalFailure):
        pq_integral_from_zero(lambda t: 1.0 / t - 1.0 / t + np.inf, 1.0, P)


def test_jackson_integrals_reject_classical():
    with pytest.raises(DomainError):
        jackson_integrals(np.exp, np.array([1.0]), PQParams.classical_point())


coef = st.floats(-5, 5, allow_nan=False)


@given(coef, coef, st.floats(0.01, 3.0))
@settings(max_examples=60, deadline=None)
def test_linearity(a, b, upper):
    lhs = pq_integral_from_zero(lambda t: a * np.exp(-t) + b * t * t, upper, P)
    rhs = a * pq_integral_from_zero(lambda t: np.exp(-t), upper, P) \
        + b * pq_integral_from_zero(lambda t: t * t, upper, P)
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-12)


@given(st.floats(0.01, 3.0), st.floats(0.5, 1.0), st.floats(0.3, 0.99))
@settings(max_examples=60, deadline=None)
def test_positive_integrand_gives_positive_integral(upper, p, ratio):
    params = PQParams(p, p * ratio)
    assert pq_integral_from_zero(lambda t: 1.0 + np.sin(t) ** 2, upper, params) > 0.0


@pytest.mark.parametrize("eps", [1e-3, 1e-4])
def test_tends_to_riemann_integral_as_q_tends_to_p(eps):
    params = PQParams(1.0, 1.0 - eps)
    val = pq_integral_from_zero(np.exp, 1.0, params, tol=1e-12)
    assert val == pytest.approx(math.e - 1.0, rel=2 * eps)
