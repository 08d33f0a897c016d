import numpy as np
import pytest
from numpy.testing import assert_allclose

from freeineq.chebyshev import ChebSeries
from freeineq.functionals import FunctionalValue, entropy_H, fisher_J, lp_information
from freeineq.measures import BetaDensity, GridMeasure, SignedDifference
from freeineq.experiments import (
    SHARPNESS_C, floor_density, geometric_entropy, geometric_family, geometric_lp_integral,
    hwi_slack, inequality_row, lp_bound, lp_explorer, pinsker_failure_table, semigroup_flow,
    sharpness_pair, trig_ratio, trig_ratio_infimum, truncation_order, verify_inequalities,
    wp_linearization_sweep,
)


def test_sharpness_pair_is_equality_case():
    for c in SHARPNESS_C:
        row = inequality_row(*sharpness_pair(c))
        assert_allclose(row["W1"], 2 * c, rtol=1e-13)
        for key in ("slack_t", "slack_lsi", "slack_hwi"):
            assert abs(row[key]) < 1e-8


def test_identical_pair_row():
    mu = BetaDensity.from_coeffs([1.0, 0.2, 0.1])
    row = inequality_row(mu, mu)
    for key in ("W1", "H", "I", "J", "slack_t", "slack_lsi", "slack_hwi"):
        assert_allclose(row[key], 0.0, atol=1e-15)


def test_verify_small_sweep():
    rep = verify_inequalities(1, 10)
    assert len(rep.rows) == 10 and rep.ok
    assert [r["sample_id"] for r in rep.rows] == list(range(10))
    again = verify_inequalities(1, 10)
    assert rep.rows == again.rows
    assert verify_inequalities(1, 0).rows == []
    with pytest.raises(ValueError):
        verify_inequalities(1, -1)


def test_verify_independent_of_jobs():
    assert verify_inequalities(3, 6, degree=8, jobs=2).rows == verify_inequalities(3, 6, degree=8).rows


def test_hwi_slack():
    assert abs(hwi_slack(*sharpness_pair(0.2))) < 1e-12
    mu = BetaDensity.from_coeffs([1.0, 0.3])
    assert_allclose(hwi_slack(mu, mu), 0.0, atol=1e-15)
    assert hwi_slack(BetaDensity.from_coeffs([1.0, 0.0, 0.4]), BetaDensity.arcsine()) > 1e-3
    atoms = GridMeasure.from_samples([0.0, 1.0])
    assert isinstance(hwi_slack(atoms, BetaDensity.arcsine()), FunctionalValue)


def test_pinsker_table():
    rows = pinsker_failure_table(32)
    first = rows[0]
    assert_allclose(first["TV"], 2 / np.pi, rtol=1e-12)
    assert_allclose(first["H"], 0.5, rtol=1e-15)
    assert_allclose(first["ratio"], np.pi ** 2 / 8, rtol=1e-10)
    assert_allclose(rows[7]["ratio"], np.pi ** 2 / 64, rtol=1e-10)
    for n in range(1, 17):
        assert_allclose(rows[n - 1]["ratio"] / rows[2 * n - 1]["ratio"], 2.0, rtol=1e-10)
    with pytest.raises(ValueError):
        pinsker_failure_table(0)


def test_floor_density():
    mu = floor_density(0.1)
    x = np.linspace(-2 / 3, 2 / 3, 21)
    assert np.all(mu.density(x) >= 0.1 / (0.1 + 70 / 256) - 1e-12)
    assert mu.coeffs[0] == pytest.approx(1.0, abs=1e-14)


def test_wp_sweep_p2_grows():
    rows = wp_linearization_sweep(2.0, (0.5, 0.05))
    assert np.isfinite(rows[0]["ratio"])
    assert rows[1]["ratio"] > rows[0]["ratio"]


def test_wp_sweep_p1_bounded():
    rows = wp_linearization_sweep(1.0, (0.5, 0.1, 0.02))
    assert all(r["ratio"] <= 2.0 + 1e-6 for r in rows)


def test_geometric_family_values():
    r, eta = 0.5, 0.1
    N = truncation_order(r)
    assert N == 80
    psi = geometric_family(r, eta)
    assert_allclose(float(fisher_J(psi)), eta ** 2 / (1 - r * r), rtol=1e-12)
    assert_allclose(geometric_entropy(r, eta), -eta ** 2 * np.log(1 - r * r) / (2 * r * r), rtol=1e-13)
    assert_allclose(geometric_lp_integral(r, 2.0, eta), eta ** 2 / (1 - r * r), rtol=1e-12)


def test_geometric_entropy_log_asymptotics():
    # H / -log(1 - r^2) -> eta^2 / 2 as r -> 1; the double-integral oracle fixes this normalization
    eta = 0.3
    ratios = [geometric_entropy(r, eta) / -np.log1p(-r * r) for r in (0.99, 0.999, 0.9999)]
    assert_allclose(ratios, eta ** 2 / (2 * np.array([0.99, 0.999, 0.9999]) ** 2), rtol=1e-12)
    assert abs(ratios[-1] - eta ** 2 / 2) < 2.5e-4 * eta ** 2 / 2


@pytest.mark.parametrize("p", [1.0, 1.4, 1.5])
def test_geometric_lp_integral_matches_series(p):
    r, eta = 0.7, 0.8
    psi = geometric_family(r, eta, 200)
    assert_allclose(geometric_lp_integral(r, p, eta), float(lp_information(psi, None, p)) ** (p / 2),
                    rtol=1e-10)


def test_lp_bound():
    assert lp_bound(0.999, 1.5) == np.inf
    assert_allclose(lp_bound(0.999, 1.4), 16 / (4 * 0.999) ** 1.4 * 10, rtol=1e-12)


def test_lp_explorer_p2_reproduces_J():
    table = lp_explorer(2.0, [0.3, 0.6], eta=0.5)
    for row in table.rows:
        psi = geometric_family(row["r"], 0.5)
        assert_allclose(row["lp_integral"], float(fisher_J(psi)), rtol=1e-12)
    with pytest.raises(ValueError):
        lp_explorer(1.5, [1.0])


def test_trig_ratio():
    assert_allclose(trig_ratio([1.0], 2.0), np.pi / 2, rtol=1e-12)
    a = np.array([0.3, -0.2, 0.5])
    assert_allclose(trig_ratio(2 * a, 1.4), trig_ratio(a, 1.4), rtol=1e-12)
    with pytest.raises(ValueError):
        trig_ratio([0.0, 0.0], 2)


def test_trig_ratio_matches_measure_ratio():
    # with a_k = gamma_k the theta substitution gives lp_information = (2/pi)^(2/p) trig-integral^(2/p)
    # and H = sum gamma_k^2 / (2k), so the two ratios differ by (2/pi)^(2/p) / (1/2)
    rng = np.random.default_rng(0)
    for _ in range(10):
        g = rng.normal(size=6)
        psi = SignedDifference(ChebSeries(np.r_[0.0, g]))
        p = rng.uniform(1.0, 2.0)
        measure_ratio = float(lp_information(psi, None, p)) / float(entropy_H(psi))
        assert_allclose(measure_ratio, trig_ratio(g, p) * (2 / np.pi) ** (2 / p) * 2, rtol=1e-6)


def test_trig_ratio_long_series_path():
    a = 0.9 ** np.arange(400)
    assert_allclose(trig_ratio(a, 1.4), trig_ratio(a[:256], 1.4), rtol=1e-12)


def test_trig_ratio_geometric_decreases_for_p14():
    vals = [trig_ratio(r ** np.arange(truncation_order(r)), 1.4) for r in (0.5, 0.9, 0.99)]
    assert vals[0] > vals[1] > vals[2]


def test_trig_ratio_infimum_smoke():
    out = trig_ratio_infimum(1.5, degree=3, n_starts=2)
    assert out["infimum"] > 0 and len(out["argmin"]) == 3


def test_semigroup_flow_single_mode():
    c = 0.4
    rows = semigroup_flow(SignedDifference(ChebSeries([0, c])), t_grid=(0.0, 0.1, 0.5, 1.0))
    for row in rows:
        t = row["t"]
        assert_allclose(row["H"], c * c / 2 * np.exp(-2 * t), rtol=1e-14)
        assert_allclose(row["I"], c * c / 2 * np.exp(-2 * t), rtol=1e-14)
        assert_allclose(row["dH_dt"], -c * c * np.exp(-2 * t), rtol=1e-6)


def test_semigroup_flow_random_decay():
    mu = BetaDensity.from_coeffs([1.0, 0.2, -0.3, 0.1, 0.05])
    rows = semigroup_flow(mu, BetaDensity.arcsine(), t_grid=(0.0, 0.1, 0.5, 1.0, 2.0))
    H = [r["H"] for r in rows]
    assert np.all(np.diff(H) < 0)
    for r in rows[1:4]:
        assert_allclose(r["dH_dt"], r["minus_2I"], atol=1e-6)
    assert semigroup_flow(mu, BetaDensity.arcsine(), t_grid=(40.0,))[0]["H"] < 1e-30
    with pytest.raises(ValueError):
        semigroup_flow(mu, BetaDensity.arcsine(), t_grid=(-1.0,))
