import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from freeineq.chebyshev import (
    ChebSeries, SecondKindSeries, alpha_integral, alpha_rule, beta_integral, beta_rule,
    default_nodes, eval_phi, eval_psi, interpolate, project,
)

coeff_lists = st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=20)


def test_eval_phi_examples():
    assert eval_phi(0, 0.7) == 1.0
    assert_allclose(eval_phi(2, 0.0), -1.0, atol=1e-15)
    assert_allclose(eval_phi(5, 2.0), 1.0, atol=1e-15)


def test_eval_phi_domain():
    with pytest.raises(ValueError):
        eval_phi(1, 2.1)
    with pytest.raises(ValueError):
        eval_phi(-1, 0.0)


def test_eval_psi_examples():
    assert_allclose(eval_psi(0, 1.3), 1.0)
    assert_allclose(eval_psi(1, 0.8), 0.8)
    assert_allclose(eval_psi(3, 0.0), 0.0, atol=1e-15)


def test_eval_psi_endpoints_need_flag():
    with pytest.raises(ValueError):
        eval_psi(2, 2.0)
    assert_allclose(eval_psi(3, 2.0, endpoints=True), 4.0)
    assert_allclose(eval_psi(3, -2.0, endpoints=True), -4.0)
    assert_allclose(eval_psi(2, -2.0, endpoints=True), 3.0)


def test_psi_sine_identity():
    theta = np.linspace(0.01, np.pi - 0.01, 50)
    for n in range(10):
        assert_allclose(eval_psi(n, 2 * np.cos(theta)) * np.sin(theta), np.sin((n + 1) * theta),
                        atol=1e-12)


def test_series_matches_direct_sum():
    rng = np.random.default_rng(0)
    c = rng.normal(size=12)
    x = np.linspace(-2, 2, 31)
    direct = sum(cn * eval_phi(n, x) for n, cn in enumerate(c))
    assert_allclose(ChebSeries(c)(x), direct, rtol=1e-12, atol=1e-12)
    direct2 = sum(cn * eval_psi(n, x[1:-1]) for n, cn in enumerate(c))
    assert_allclose(SecondKindSeries(c)(x[1:-1]), direct2, rtol=1e-12, atol=1e-11)


def test_series_rejects_nonfinite():
    with pytest.raises(ValueError):
        ChebSeries([1.0, np.nan])


def test_beta_integral_examples():
    assert beta_integral(ChebSeries([1.0])) == 1.0
    assert beta_integral(ChebSeries.basis(3)) == 0.0
    assert_allclose(beta_integral(lambda x: x * x, beta_rule(8)), 2.0, rtol=1e-14)


def test_alpha_integral_examples():
    assert_allclose(alpha_integral(lambda x: np.ones_like(x), alpha_rule(4)), 1.0)
    assert_allclose(alpha_integral(lambda x: x * x, alpha_rule(4)), 1.0, rtol=1e-14)
    # |x| is not polynomial: check convergence to 8/(3 pi)
    assert_allclose(alpha_integral(lambda x: np.abs(x), alpha_rule(4001)), 8 / (3 * np.pi), rtol=1e-6)


@pytest.mark.parametrize("kind", ["alpha", "beta"])
def test_rule_exactness_on_monomials(kind):
    # moments: beta -> C(2m, m), alpha -> Catalan numbers
    from math import comb
    K = 10
    rule = beta_rule(K) if kind == "beta" else alpha_rule(K)
    assert_allclose(rule.weights.sum(), 1.0, rtol=1e-14)
    for d in range(2 * K):
        m = d // 2
        exact = 0.0 if d % 2 else (comb(2 * m, m) if kind == "beta" else comb(2 * m, m) / (m + 1))
        assert_allclose(rule.apply(lambda x: x ** d), exact, rtol=1e-12, atol=1e-14 * 2.0 ** d)


def test_gram_phi():
    rule = beta_rule(200)
    V = np.array([eval_phi(n, rule.nodes) for n in range(65)])
    G = (V * rule.weights) @ V.T
    expected = np.diag(np.r_[1.0, np.full(64, 0.5)])
    assert_allclose(G, expected, atol=1e-12)


def test_gram_psi():
    rule = alpha_rule(200)
    V = np.array([eval_psi(n, rule.nodes) for n in range(65)])
    G = (V * rule.weights) @ V.T
    assert_allclose(G, np.eye(65), atol=1e-12)


def test_derivative_identity():
    x = np.linspace(-1.9, 1.9, 20)
    h = 1e-3
    for n in range(1, 12):
        f = ChebSeries.basis(n)
        fd = (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h)
        assert_allclose(f.derivative()(x), fd, rtol=1e-8, atol=1e-8)
        assert_allclose(f.derivative()(x), 0.5 * n * eval_psi(n - 1, x), rtol=1e-12, atol=1e-12)


def test_project_examples():
    rule = beta_rule(16)
    assert_allclose(project(rule.nodes, degree=4, rule=rule).coeffs, [0, 2, 0, 0, 0], atol=1e-14)
    assert_allclose(project(np.ones(16), degree=3, rule=rule).coeffs, [1, 0, 0, 0], atol=1e-14)
    c = project(rule.nodes ** 2, degree=4, rule=rule)
    assert_allclose(c.coeffs, [2, 0, 2, 0, 0], atol=1e-13)
    x = np.linspace(-2, 2, 5)
    assert_allclose(c(x), x ** 2, atol=1e-13)


def test_project_length_mismatch():
    with pytest.raises(ValueError):
        project(np.ones(5), rule=beta_rule(6))
    with pytest.raises(ValueError):
        project(np.ones(5), degree=5)


@settings(max_examples=50, deadline=None)
@given(coeff_lists)
def test_project_eval_roundtrip(c):
    f = ChebSeries(c)
    rule = beta_rule(default_nodes(f.degree))
    assert_allclose(project(f(rule.nodes), degree=f.degree, rule=rule).coeffs, f.coeffs, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(coeff_lists)
def test_second_kind_to_first_kind(c):
    q = SecondKindSeries(c)
    x = np.linspace(-1.99, 1.99, 17)
    assert_allclose(ChebSeries(q.to_first_kind())(x), q(x), atol=1e-10)


def test_real_roots():
    # psi_3 = U_3(x/2) vanishes at 2 cos(k pi / 4)
    r = SecondKindSeries([0, 0, 0, 1]).real_roots()
    assert_allclose(r, 2 * np.cos(np.pi * np.array([3, 2, 1]) / 4), atol=1e-12)


def test_interpolate_smooth_function():
    f = interpolate(np.exp, 30)
    x = np.linspace(-2, 2, 41)
    assert_allclose(f(x), np.exp(x), rtol=1e-13)
