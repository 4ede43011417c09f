import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pqszasz.pq_core import (
    LOG_SWITCHOVER,
    DomainError,
    NumericalFailure,
    PQParams,
    log_exponential_terms,
    pq_binomial,
    pq_exponential,
    pq_factorial,
    pq_integer,
    pq_integers,
)

P98 = PQParams(0.9, 0.8)

pq_pairs = st.tuples(st.floats(0.05, 1.0), st.floats(0.05, 0.999)).map(
    lambda t: (t[0], t[0] * t[1])
).filter(lambda t: t[1] < t[0])


def test_params_validation():
    with pytest.raises(DomainError):
        PQParams(0.8, 0.9)
    with pytest.raises(DomainError):
        PQParams(1.1, 0.5)
    with pytest.raises(DomainError):
        PQParams(0.9, 0.9)
    with pytest.raises(DomainError):
        PQParams(0.9, 0.8, classical=True)
    assert PQParams.make(1.0, 1.0).classical
    assert not PQParams.make(0.95, 0.9).classical


def test_bracket_examples():
    assert pq_integer(0, P98) == 0.0
    assert pq_integer(2, P98) == pytest.approx(1.7, rel=1e-15)
    assert pq_integer(3, P98) == pytest.approx(2.17, rel=1e-15)
    assert pq_integer(7, PQParams.classical_point()) == 7.0


def test_bracket_negative_n():
    with pytest.raises(DomainError):
        pq_integer(-1, P98)


def test_factorial_examples():
    assert pq_factorial(0, P98) == 1.0
    assert pq_factorial(1, P98) == 1.0
    assert pq_factorial(3, P98) == pytest.approx(1.7 * 2.17, rel=1e-14)


@pytest.mark.parametrize("n", [LOG_SWITCHOVER - 1, LOG_SWITCHOVER, LOG_SWITCHOVER + 1, 80])
def test_factorial_against_oracle_across_switchover(n):
    ref = oracles.factorial(n, 0.95, 0.9)
    assert pq_factorial(n, PQParams(0.95, 0.9)) == pytest.approx(float(ref), rel=1e-12)


def test_binomial_examples():
    assert pq_binomial(5, 0, P98) == pytest.approx(1.0, rel=1e-14)
    assert pq_binomial(3, 1, P98) == pytest.approx(2.17, rel=1e-13)
    assert pq_binomial(4, 2, PQParams.classical_point()) == pytest.approx(6.0, rel=1e-13)
    with pytest.raises(DomainError):
        pq_binomial(2, 3, P98)


def test_q_integer_at_p_one():
    params = PQParams(1.0, 0.5)
    for n in range(1, 12):
        assert pq_integer(n, params) == pytest.approx((1 - 0.5**n) / 0.5, rel=1e-15)


@given(pq_pairs, st.integers(1, 60))
@settings(max_examples=200, deadline=None)
def test_bracket_matches_high_precision(pq, n):
    p, q = pq
    ref = float(oracles.bracket(n, p, q))
    assert pq_integer(n, PQParams(p, q)) == pytest.approx(ref, rel=1e-13)


@given(pq_pairs, st.integers(1, 40))
@settings(max_examples=200, deadline=None)
def test_bracket_is_symmetric_in_p_and_q(pq, n):
    p, q = pq
    # [n]_{p,q} = sum p^(n-1-i) q^i is symmetric, so swap through q/p scaling
    direct = pq_integer(n, PQParams(p, q))
    swapped = float(mp.fsum(mp.mpf(q) ** (n - 1 - i) * mp.mpf(p) ** i for i in range(n)))
    assert direct == pytest.approx(swapped, rel=1e-13)


@given(pq_pairs, st.integers(1, 40))
@settings(max_examples=200, deadline=None)
def test_bracket_shift_identity(pq, n):
    p, q = pq
    params = PQParams(p, q)
    for k in range(0, n + 1):
        lhs = q**k * pq_integer(n - k + 1, params)
        rhs = pq_integer(n + 1, params) - p ** (n - k + 1) * pq_integer(k, params)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


@given(pq_pairs)
@settings(max_examples=100, deadline=None)
def test_bracket_monotone_in_n_when_p_is_one(pq):
    _, q = pq
    params = PQParams(1.0, min(q, 0.999))
    vals = [pq_integer(n, params) for n in range(1, 30)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    # strictly increasing while the increment q^n is above rounding level
    strict = [b > a for n, (a, b) in enumerate(zip(vals, vals[1:]), 1)
              if params.q**n > 1e-14 * a]
    assert all(strict)


def test_bracket_tends_to_zero_for_fixed_sub_unit_p():
    params = PQParams(0.95, 0.9)
    assert pq_integer(2000, params) < 1e-30


def test_vectorised_brackets_agree():
    ns = np.arange(1, 200)
    p = np.full(ns.shape, 0.99)
    q = np.full(ns.shape, 0.97)
    vec = pq_integers(ns, p, q)
    scal = [pq_integer(int(n), PQParams(0.99, 0.97)) for n in ns]
    np.testing.assert_allclose(vec, scal, rtol=1e-12)
    assert pq_integers([5], [1.0], [1.0])[0] == 5.0


def test_exponential_examples():
    assert pq_exponential(0.0, "small-e", P98) == 1.0
    assert pq_exponential(0.0, "big-E", P98) == 1.0
    assert pq_exponential(1.0, "big-E", PQParams.classical_point()) == pytest.approx(math.e,
                                                                                     rel=1e-15)


@pytest.mark.parametrize("x", [-2.0, -1.0, -0.3, 0.4, 1.0, 2.5])
def test_exponential_product_identity(x):
    params = PQParams(0.95, 0.9)
    e = pq_exponential(x, "small-e", params)
    E = pq_exponential(-x, "big-E", params)
    assert e * E == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("kind,base", [("small-e", 0.95), ("big-E", 0.9)])
def test_exponential_against_oracle(kind, base):
    params = PQParams(0.95, 0.9)
    ref = oracles.exp_series(1.7, base, 0.95, 0.9)
    assert pq_exponential(1.7, kind, params) == pytest.approx(float(ref), rel=1e-13)


def test_exponential_errors():
    with pytest.raises(DomainError):
        pq_exponential(1.0, "weird", P98)
    with pytest.raises(DomainError):
        pq_exponential(1.0, "big-E", P98, tol=0.0)
    # small-e with p < 1 has a finite radius of convergence
    with pytest.raises(NumericalFailure):
        pq_exponential(80.0, "small-e", PQParams(0.95, 0.9), max_terms=200)


def test_log_terms_budget_failure():
    with pytest.raises(NumericalFailure) as info:
        log_exponential_terms(50.0, 1.0, PQParams(1.0, 0.5), max_terms=50)
    assert info.value.terms_examined == 50


def test_bracket_rises_then_falls_when_p_below_one():
    # strict growth in n only holds at p = 1; for p < 1 the bracket peaks and decays
    params = PQParams(0.95, 0.9)
    vals = np.array([pq_integer(n, params) for n in range(1, 200)])
    peak = int(np.argmax(vals))
    assert 0 < peak < vals.size - 1
    assert np.all(np.diff(vals[: peak + 1]) > 0)
    assert np.all(np.diff(vals[peak:]) < 0)


@given(pq_pairs, st.integers(0, 40), st.integers(0, 40))
@settings(max_examples=200, deadline=None)
def test_binomial_symmetry(pq, n, k):
    if k > n:
        n, k = k, n
    params = PQParams(*pq)
    assert pq_binomial(n, k, params) == pytest.approx(pq_binomial(n, n - k, params), rel=1e-12)


GRID_PARAMS = [PQParams(p, q) for p in (0.9, 0.95, 0.99) for q in (0.8, 0.9, 0.95) if q < p]


@pytest.mark.parametrize("params", GRID_PARAMS, ids=lambda p: f"p{p.p}q{p.q}")
@pytest.mark.parametrize("x", np.linspace(-5, 5, 11))
def test_exponential_product_identity_grid(params, x):
    e = pq_exponential(x, "small-e", params)
    E = pq_exponential(-x, "big-E", params)
    assert e * E == pytest.approx(1.0, abs=1e-10)
