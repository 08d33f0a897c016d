import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from freeineq.chebyshev import ChebSeries
from freeineq.functionals import entropy_H
from freeineq.measures import (
    BetaDensity, GridMeasure, ScaledMeasure, SignedDifference, grid_from_density, random_density,
    rescale,
)
from freeineq.transport import (
    adaptive_gauss, dual_upper_bound, monotone_map, w1_dual_spectral, wasserstein_p,
)

ARCSINE = BetaDensity.arcsine()


def random_pairs(seed, count, degree=32):
    out = []
    for ss in np.random.SeedSequence(seed).spawn(count):
        rng = np.random.default_rng(ss)
        out.append((random_density(rng, degree), random_density(rng, degree)))
    return out


def test_identical_is_zero():
    mu = random_density(np.random.default_rng(0), 16)
    assert wasserstein_p(mu, mu, 1) == 0.0
    assert_allclose(wasserstein_p(mu, mu, 2), 0.0, atol=1e-12)


def test_linear_mode_example():
    # mu - nu = c x beta with c = 0.25 is gamma_1 = 0.5
    mu = BetaDensity.from_coeffs([1.0, 0.5])
    assert_allclose(wasserstein_p(mu, ARCSINE, 1), 0.5, atol=1e-14)
    assert_allclose(wasserstein_p(mu, ARCSINE, 1, method="quantile"), 0.5, atol=1e-10)


def test_second_mode_example():
    mu = BetaDensity.from_coeffs([1.0, 0.0, 0.5])
    assert_allclose(wasserstein_p(mu, ARCSINE, 1), 2 / (3 * np.pi), atol=1e-12)
    assert_allclose(wasserstein_p(mu, ARCSINE, 1, method="quantile"), 2 / (3 * np.pi), atol=1e-10)


def test_grid_against_scipy():
    rng = np.random.default_rng(1)
    a, b = np.sort(rng.normal(size=7)), np.sort(rng.normal(size=7) + 0.3)
    ga, gb = GridMeasure.from_samples(a), GridMeasure.from_samples(b)
    assert_allclose(wasserstein_p(ga, gb, 1), stats.wasserstein_distance(a, b), rtol=1e-12)
    assert_allclose(wasserstein_p(ga, gb, 1, method="quantile"), stats.wasserstein_distance(a, b),
                    rtol=1e-12)
    # W_2 of equal-size samples pairs sorted points
    assert_allclose(wasserstein_p(ga, gb, 2), np.sqrt(np.mean((a - b) ** 2)), rtol=1e-12)


def test_grid_cells_converge_to_density():
    mu = BetaDensity.from_coeffs([1.0, 0.5])
    gm, gn = grid_from_density(mu, 2000), grid_from_density(ARCSINE, 2000)
    assert_allclose(wasserstein_p(gm, gn, 1), 0.5, atol=1e-5)


def test_metric_axioms():
    rng = np.random.default_rng(2)
    for _ in range(5):
        a, b, c = (random_density(rng, 16) for _ in range(3))
        ab, bc, ac = (wasserstein_p(*m, 1) for m in ((a, b), (b, c), (a, c)))
        assert_allclose(wasserstein_p(b, a, 1), ab, rtol=1e-12)
        assert ac <= ab + bc + 1e-8
        for p in (1.5, 2.0):
            assert wasserstein_p(a, c, p) <= wasserstein_p(a, b, p) + wasserstein_p(b, c, p) + 1e-8


def test_p_monotone():
    mu, nu = random_pairs(3, 1)[0]
    vals = [wasserstein_p(mu, nu, p, method="quantile") for p in (1, 1.5, 2, 3)]
    assert np.all(np.diff(vals) >= -1e-12)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        wasserstein_p(ARCSINE, ARCSINE, 0.5)
    with pytest.raises(ValueError):
        wasserstein_p(ARCSINE, ARCSINE, 2, method="cdf")
    with pytest.raises(ValueError):
        wasserstein_p(ARCSINE, ARCSINE, 1, method="bogus")


def test_dual_examples():
    assert_allclose(w1_dual_spectral(SignedDifference(ChebSeries([0, -0.4]))), 0.4, rtol=1e-14)
    assert w1_dual_spectral(SignedDifference(ChebSeries([0.0]))) == 0.0
    g2 = 0.7
    assert_allclose(w1_dual_spectral(SignedDifference(ChebSeries([0, 0, g2]))), 4 * g2 / (3 * np.pi),
                    rtol=1e-12)
    with pytest.raises(ValueError):
        w1_dual_spectral(SignedDifference(ChebSeries([0.2, 1.0])))


def test_dual_agrees_and_upper_bound():
    for mu, nu in random_pairs(4, 30):
        w = wasserstein_p(mu, nu, 1)
        assert_allclose(w1_dual_spectral(mu, nu), w, atol=1e-10)
        assert w * w <= dual_upper_bound(mu, nu) + 1e-12
    psi = SignedDifference(ChebSeries([0, 0.3]))
    assert_allclose(w1_dual_spectral(psi) ** 2, dual_upper_bound(psi), rtol=1e-13)


def test_transportation_inequality_sample():
    for mu, nu in random_pairs(5, 50):
        assert wasserstein_p(mu, nu, 1) ** 2 <= 2 * float(entropy_H(mu, nu)) + 1e-10


@pytest.mark.parametrize("L", [0.5, 3.0])
def test_scaled_transportation(L):
    for mu, nu in random_pairs(6, 10):
        w = wasserstein_p(rescale(mu, L), rescale(nu, L), 1)
        assert w * w <= 2 * L * L * float(entropy_H(mu, nu)) + 1e-10


def test_monotone_map_identity_and_affine():
    mu = random_density(np.random.default_rng(7), 12)
    x = np.linspace(-1.9, 1.9, 11)
    assert_allclose(monotone_map(mu, mu)(x), x, atol=1e-12)
    half = ScaledMeasure(ARCSINE, 0.5)
    assert_allclose(monotone_map(half, ARCSINE)(x), x / 2, atol=1e-12)


def test_monotone_map_pushforward_and_cost():
    for mu, nu in random_pairs(8, 20, degree=16):
        T = monotone_map(mu, nu)
        assert_allclose(T.cost(), wasserstein_p(mu, nu, 1), atol=1e-8)
    x = np.linspace(-2, 2, 50)
    y = T(x)
    assert np.all(np.diff(y) >= 0)
    # nu(T <= y) = F_nu(T^{-1}(y)) must equal F_mu(y)
    t = np.linspace(0.01, 0.99, 50)
    assert_allclose(mu.cdf(T(nu.quantile(t))), t, atol=1e-8)


def test_monotone_map_rejects_atoms():
    with pytest.raises(ValueError):
        monotone_map(ARCSINE, GridMeasure.from_samples([0.0, 1.0]))


def test_adaptive_gauss():
    assert_allclose(adaptive_gauss(np.sqrt, np.array([0.0, 1.0])), 2 / 3, atol=1e-12)
    assert_allclose(adaptive_gauss(lambda t: np.abs(t - 0.3), np.linspace(0, 1, 5)), 0.29, atol=1e-12)
