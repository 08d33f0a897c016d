import json

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from freeineq.chebyshev import ChebSeries
from freeineq.measures import (
    BetaDensity, GridMeasure, ScaledMeasure, SignedDifference, grid_from_density, load_measure,
    measure_from_spec, measure_to_spec, random_density, rescale,
)
from freeineq.transport import wasserstein_p


def test_beta_density_invariants():
    with pytest.raises(ValueError):
        BetaDensity.from_coeffs([0.9, 0.1])
    with pytest.raises(ValueError):
        BetaDensity.from_coeffs([1.0, 1.5])  # 1 + 1.5 x/2 < 0 near x = -2
    assert BetaDensity.semicircle().min_density() >= -1e-12


def test_cdf_examples():
    beta = BetaDensity.arcsine()
    assert_allclose(beta.cdf(0.0), 0.5, atol=1e-15)
    assert_allclose(beta.cdf(2.0), 1.0)
    assert_allclose(beta.cdf(-2.0), 0.0)
    assert_allclose(BetaDensity.from_coeffs([1, 0, 0.5]).cdf(0.0), 0.5, atol=1e-15)
    with pytest.raises(ValueError):
        beta.cdf(2.5)


def test_cdf_matches_density_quadrature():
    rng = np.random.default_rng(1)
    mu = random_density(rng, 12)
    for x in rng.uniform(-2, 2, 50):
        # theta substitution removes the endpoint singularity
        th = np.arccos(x / 2)
        ref = integrate.quad(lambda u: mu.density(2 * np.cos(u)) / np.pi, th, np.pi,
                             epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        assert_allclose(mu.cdf(x), ref, atol=1e-10)


def test_cdf_sign_on_asymmetric_density():
    # 1 + x/2 puts more mass on the right: F(0) = 1/2 + int_{-2}^0 x / (2 pi sqrt(4 - x^2)) dx
    mu = BetaDensity.from_coeffs([1.0, 1.0])
    assert_allclose(mu.cdf(0.0), 0.5 - 1 / np.pi, atol=1e-15)


def test_quantile_examples():
    beta = BetaDensity.arcsine()
    assert_allclose(beta.quantile(0.5), 0.0, atol=1e-14)
    assert_allclose(beta.quantile(0.25), -np.sqrt(2), atol=1e-14)
    assert beta.quantile(0.0) == -2.0 and beta.quantile(1.0) == 2.0


def test_quantile_inverts_cdf():
    rng = np.random.default_rng(2)
    mu = random_density(rng, 32)
    t = rng.uniform(0, 1, 100)
    assert np.max(np.abs(mu.cdf(mu.quantile(t)) - t)) < 1e-9
    assert np.all(np.diff(mu.quantile(np.sort(t))) >= 0)


def test_atomic_quantile_is_left_continuous():
    g = GridMeasure.from_samples([-1.0, 0.0, 0.5, 1.0])
    assert g.quantile(0.25) == -1.0
    assert g.quantile(0.2500001) == 0.0
    assert g.quantile(1.0) == 1.0


def test_grid_measure_validation():
    with pytest.raises(ValueError):
        GridMeasure([0.0, 1.0], [0.5, 0.6], (0, 1))
    with pytest.raises(ValueError):
        GridMeasure([1.0, 0.0], [0.5, 0.5], (0, 1))
    with pytest.raises(ValueError):
        GridMeasure([0.0, 2.0], [0.5, 0.5], (0, 1))
    with pytest.raises(ValueError):
        GridMeasure([0.0, 1.0], [1.5, -0.5], (0, 1))


def test_grid_from_density_examples():
    beta = BetaDensity.arcsine()
    assert_allclose(grid_from_density(beta, 2).weights, [0.5, 0.5], atol=1e-15)
    assert_allclose(grid_from_density(beta, 4).weights, [1 / 3, 1 / 6, 1 / 6, 1 / 3], atol=1e-15)
    mu = random_density(np.random.default_rng(3), 16)
    assert_allclose(grid_from_density(mu, 37).weights.sum(), 1.0, atol=1e-14)
    with pytest.raises(ValueError):
        grid_from_density(beta, 1)


def test_rescale_identity_and_w1_scaling():
    mu = BetaDensity.from_coeffs([1.0, 0.5])
    nu = BetaDensity.arcsine()
    one = rescale(mu, 1.0)
    x = np.linspace(-2, 2, 9)
    assert_allclose(one.cdf_extended(x), mu.cdf_extended(x))
    w = wasserstein_p(mu, nu, 1)
    assert_allclose(wasserstein_p(rescale(mu, 3.0), rescale(nu, 3.0), 1), 3 * w, rtol=1e-12)
    assert_allclose(wasserstein_p(rescale(mu, 3.0), rescale(nu, 3.0), 1, method="quantile"),
                    3 * w, rtol=1e-10)
    with pytest.raises(ValueError):
        rescale(mu, 0.0)


def test_rescale_grid_and_scaled():
    g = GridMeasure.uniform_cells((-1, 1), [0.25, 0.75])
    r = rescale(g, 2.0, center=1.0)
    assert_allclose(r.interval, (-1.0, 3.0))
    s = rescale(rescale(BetaDensity.arcsine(), 2.0), 1.5)
    assert isinstance(s, ScaledMeasure) and s.half_width == 3.0


def test_scaled_measure_mass():
    s = ScaledMeasure(BetaDensity.semicircle(), 0.7, 2.0)
    assert_allclose(s.cdf_extended([s.support[0] - 1, s.support[1] + 1]), [0.0, 1.0])
    with pytest.raises(ValueError):
        ScaledMeasure(BetaDensity.arcsine(), -1.0)


def test_random_density_positive():
    rng = np.random.default_rng(4)
    for _ in range(20):
        mu = random_density(rng, 32)
        assert mu.min_density() >= 0.01 - 1e-12
        assert mu.coeffs[0] == 1.0


def test_signed_difference():
    d = SignedDifference.of(BetaDensity.from_coeffs([1, 0.2]), BetaDensity.arcsine())
    assert_allclose(d.gamma, [0, 0.2])
    with pytest.raises(ValueError):
        SignedDifference(ChebSeries([0.1, 1.0]))


def test_spec_roundtrip(tmp_path):
    specs = [
        {"kind": "cheb", "coeffs": [1.0, 0.3]},
        {"kind": "grid", "nodes": [0.25, 0.75], "weights": [0.4, 0.6], "interval": [0.0, 1.0]},
        {"kind": "samples", "points": [0.0, 1.0, 2.0]},
    ]
    for spec in specs:
        p = tmp_path / "m.json"
        p.write_text(json.dumps(spec))
        assert measure_to_spec(load_measure(p)) == spec
    with pytest.raises(ValueError):
        measure_from_spec({"kind": "nope"})
