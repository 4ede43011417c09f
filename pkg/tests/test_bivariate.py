import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqszasz import testfunctions as tf
from pqszasz.bivariate import (
    SeparableSum,
    apply_bivariate,
    bivariate_lipschitz_maximal,
    bivariate_modulus,
    bivariate_moment_closed_form,
    measure_M_bivariate,
    theorem61_certificate,
    theorem62_certificate,
)
from pqszasz.error_bounds import SetE
from pqszasz.kantorovich import moment_closed_form, second_central_moment
from pqszasz.pq_core import DomainError, PQParams, pq_integer

P = PQParams(0.95, 0.9)
Q = PQParams(0.99, 0.95)
C = PQParams.classical_point()
STEP = 1.0 / 64


def const(t, s):
    return np.full(np.broadcast(np.asarray(t), np.asarray(s)).shape, 2.0)


def test_constant_and_first_moments():
    assert apply_bivariate(tf.bivariate("one"), 5, 7, P, Q, 0.3, 1.2) == pytest.approx(1.0)
    val = apply_bivariate(tf.bivariate("t"), 5, 7, P, Q, 0.3, 1.2)
    assert val == pytest.approx(0.3 / 0.9 + 1 / (pq_integer(2, P) * pq_integer(5, P)), rel=1e-12)
    assert val == pytest.approx(apply_bivariate(tf.bivariate("t"), 5, 7, P, Q, 0.3, 0.0),
                                rel=1e-14)


def test_product_factorises():
    val = apply_bivariate(tf.bivariate("prod"), 5, 7, P, Q, 0.3, 1.2)
    ref = moment_closed_form(1, 5, P, 0.3) * moment_closed_form(1, 7, Q, 1.2)
    assert val == pytest.approx(ref, rel=1e-12)


def test_closed_form_examples():
    assert bivariate_moment_closed_form(0, 3, 4, P, Q, 1.0, 1.0) == 1.0
    # classical: 2 (1 + 2/10 + 1/300)
    assert bivariate_moment_closed_form(3, 10, 10, C, C, 1.0, 1.0) == pytest.approx(
        2 * (1 + 0.2 + 1 / 300), rel=1e-14)
    assert bivariate_moment_closed_form(2, 3, 4, P, Q, 0.7, 0.0) == pytest.approx(
        1 / (pq_integer(2, Q) * pq_integer(4, Q)), rel=1e-14)
    with pytest.raises(DomainError):
        bivariate_moment_closed_form(4, 3, 4, P, Q, 1.0, 1.0)
    with pytest.raises(DomainError):
        apply_bivariate(const, 0, 4, P, Q, 1.0, 1.0)


@pytest.mark.parametrize("params1,params2", [(P, Q), (C, C), (C, P)],
                         ids=["pq", "classical", "mixed"])
def test_generic_path_matches_factorised(params1, params2):
    for name in ("one", "t", "s", "sq", "prod", "exp"):
        f = tf.bivariate(name)
        fast = apply_bivariate(f, 5, 6, params1, params2, 0.5, 1.0)
        slow = apply_bivariate(f, 5, 6, params1, params2, 0.5, 1.0, generic=True)
        assert slow == pytest.approx(fast, rel=1e-8, abs=1e-12)


def test_non_separable_function():
    f = lambda t, s: np.sqrt(1.0 + t * s)  # noqa: E731
    val = apply_bivariate(f, 10, 10, C, C, 0.5, 0.5)
    assert val == pytest.approx(math.sqrt(1.25), rel=0.05)


def test_modulus_examples():
    assert bivariate_modulus(const, 0.1, 0.2) == 0.0
    assert bivariate_modulus(tf.bivariate("sum"), 0.1, 0.2) == pytest.approx(0.3, abs=2 * STEP)
    assert bivariate_modulus(tf.bivariate("t"), 0.1, 0.2) == pytest.approx(0.1, abs=STEP)
    with pytest.raises(DomainError):
        bivariate_modulus(const, 0.0, 0.2)


def test_lipschitz_maximal_examples():
    assert bivariate_lipschitz_maximal(const, 1, 1, 0.5, 0.5) == 0.0
    assert bivariate_lipschitz_maximal(tf.bivariate("prod"), 1, 1, 0, 0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        bivariate_lipschitz_maximal(const, 0, 1, 0.5, 0.5)


def test_lipschitz_maximal_of_one_variable_function_grows_with_refinement():
    # a non-constant s-independent f is in no product Lipschitz class, so the
    # grid value is driven by the smallest admissible |s - y|
    f = tf.bivariate("t")
    vals = [bivariate_lipschitz_maximal(f, 1, 1, 0.5, 0.5, grid_step=h)
            for h in (1 / 16, 1 / 32, 1 / 64)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] == pytest.approx(64.0, rel=1e-9)


def test_bivariate_modulus_certificate_constant():
    cert = theorem61_certificate(const, 5, 5, P, P, 1.0, 1.0)
    assert cert.lhs == pytest.approx(0.0, abs=1e-12) and cert.holds


def test_bivariate_modulus_certificate_sum_classical():
    cert = theorem61_certificate(tf.bivariate("sum"), 10, 10, C, C, 1.0, 1.0, f_id="sum")
    assert cert.lhs == pytest.approx(0.1, rel=1e-10)
    r = math.sqrt(second_central_moment(10, C, 1.0))
    assert cert.rhs == pytest.approx(4 * 2 * r, abs=4 * 2 * STEP)
    assert cert.holds and cert.context["holds_with_8"]


def test_bivariate_modulus_certificate_exp_fixture():
    cert = theorem61_certificate(tf.bivariate("exp"), 20, 20, P, P, 0.5, 0.5)
    assert cert.holds and cert.slack > 0
    assert cert.lhs == pytest.approx(0.0670334394353595, rel=1e-9)
    assert cert.rhs == pytest.approx(2.2796214374397508, rel=1e-9)


def test_bivariate_lipschitz_certificate_halfline_form():
    M = 3.0
    cert = theorem62_certificate(tf.bivariate("prod"), 1, 0.5, M, SetE.halfline(),
                                 5, 6, P, Q, 0.5, 1.0)
    ref = M * second_central_moment(5, P, 0.5) ** 0.5 * second_central_moment(6, Q, 1.0) ** 0.25
    assert cert.rhs == pytest.approx(ref, rel=1e-12)


def test_bivariate_lipschitz_certificate_constant_sum_and_errors():
    assert theorem62_certificate(const, 1, 1, 1.0, SetE.halfline(), 5, 5, P, P, 1, 1).holds
    cert = theorem62_certificate(tf.bivariate("sum"), 1, 1, None, SetE.halfline(),
                                 10, 10, C, C, 1.0, 1.0)
    assert cert.holds
    with pytest.raises(DomainError):
        theorem62_certificate(const, 1, 1, -1.0, SetE.halfline(), 5, 5, P, P, 1, 1)


def test_measured_M_is_positive_and_covers_origin():
    M = measure_M_bivariate(tf.bivariate("prod"), 1, 1)
    assert M >= bivariate_lipschitz_maximal(tf.bivariate("prod"), 1, 1, 0, 0, grid_step=1 / 32)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 2), st.floats(0, 2))
@settings(max_examples=30, deadline=None)
def test_linearity_and_positivity(a, b, x, y):
    f = SeparableSum([(a, lambda t: t, lambda s: np.ones_like(s)),
                      (b, lambda t: np.sqrt(t), lambda s: s)])
    val = apply_bivariate(f, 5, 8, P, Q, x, y)
    ref = a * apply_bivariate(tf.bivariate("t"), 5, 8, P, Q, x, y) + b * apply_bivariate(
        SeparableSum([(1.0, np.sqrt, lambda s: s)]), 5, 8, P, Q, x, y)
    assert val == pytest.approx(ref, rel=1e-11, abs=1e-12)
    assert apply_bivariate(tf.bivariate("prod"), 5, 8, P, Q, x, y) >= 0.0


@given(st.integers(1, 40), st.integers(1, 40), st.floats(0, 2), st.floats(0, 2))
@settings(max_examples=50, deadline=None)
def test_second_moment_is_sum_of_univariate(n1, n2, x, y):
    ref = moment_closed_form(2, n1, P, x) + moment_closed_form(2, n2, Q, y)
    val = apply_bivariate(tf.bivariate("sq"), n1, n2, P, Q, x, y)
    assert val == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("name", ["sum", "prod", "exp"])
@pytest.mark.parametrize("d1,d2", [(0.1, 0.2), (0.3, 0.05)])
def test_modulus_growth_property(name, d1, d2):
    f = tf.bivariate(name)
    w = bivariate_modulus(f, d1, d2, 2.0, 1.0 / 128)
    g = np.linspace(0.0, 2.0, 17)
    T, S = np.meshgrid(g, g, indexing="ij")
    F = f(T, S)
    for i, j in [(0, 0), (5, 9), (16, 16), (8, 3)]:
        x, y = g[i], g[j]
        lhs = np.abs(F - F[i, j])
        rhs = w * (np.abs(T - x) / d1 + 1) * (np.abs(S - y) / d2 + 1)
        assert np.all(lhs <= rhs + 1e-12)


def test_bivariate_korovkin_exception_densities_vanish():
    from pqszasz.statistical import exception_density, get_scheme, grid_sups, stat_limit_check

    # both axes follow the disturbed scheme along the diagonal n1 = n2 = n;
    # K(f_i) - f_i splits into per-axis terms, so the grid sups add up
    scheme = get_scheme("disturbed-squares")
    grid = np.linspace(0.0, 2.0, 41)
    eps = 0.05

    def sup_f3(k):
        p, q = scheme.p_q(k)
        return 2.0 * grid_sups(k, p, q, grid)[2]

    def sup_f1(k):
        p, q = scheme.p_q(k)
        return grid_sups(k, p, q, grid)[1]

    for seq in (sup_f1, sup_f3):
        dens = [stat_limit_check(seq, 0.0, eps, N).density_estimate
                for N in (10**3, 10**4, 10**5, 10**6)]
        assert all(b < a for a, b in zip(dens, dens[1:]))
        assert dens[-1] < 0.002
    assert exception_density(scheme, 2, grid, eps, 10**5).density_estimate < 0.01


@pytest.mark.parametrize("x", [0.5, 1.0])
def test_axis_deltas_vanish_statistically(x):
    from pqszasz.statistical import (
        get_scheme,
        second_central_moment_array,
        stat_limit_check,
    )

    scheme = get_scheme("disturbed-squares")

    def delta(k):
        return second_central_moment_array(k, *scheme.p_q(k), x)

    dens = [stat_limit_check(delta, 0.0, 0.01, N).density_estimate for N in (10**3, 10**4, 10**5)]
    assert dens[-1] < dens[0] and dens[-1] < 0.01
