"""Seeded numerical studies of the inequalities, their sharpness and their failures."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft, optimize

from .chebyshev import ChebSeries, SecondKindSeries, interpolate
from .functionals import FunctionalValue, entropy_H, fisher_I, fisher_J, total_variation
from .measures import BetaDensity, SignedDifference, random_density
from .operators import semigroup
from .transport import wasserstein_p

VIOLATION_FLOOR = -1e-9
SHARPNESS_C = (0.1, 0.3, 0.5)
VERIFY_COLUMNS = ("sample_id", "W1", "H", "I", "J", "slack_t", "slack_lsi", "slack_hwi")


# --- inequality sweeps ---------------------------------------------------------------


def inequality_row(mu, nu) -> dict:
    """``W_1``, ``H``, ``I``, ``J`` and the transport, log-Sobolev and HWI slacks."""
    w1 = wasserstein_p(mu, nu, 1)
    H = float(entropy_H(mu, nu))
    I = float(fisher_I(mu, nu))
    J = float(fisher_J(mu, nu))
    return {
        "W1": w1, "H": H, "I": I, "J": J,
        "slack_t": 2.0 * H - w1 * w1,
        "slack_lsi": J - 2.0 * H,
        "slack_hwi": math.sqrt(2.0 * I) * w1 - 0.5 * w1 * w1 - H,
    }


def sharpness_pair(c: float) -> tuple[BetaDensity, BetaDensity]:
    """``mu - nu = c x beta(dx)``: ``mu = (1 + 2c phi_1) beta``, ``nu = beta``."""
    return BetaDensity.from_coeffs([1.0, 2.0 * c]), BetaDensity.arcsine()


def _sample(args):
    seed_seq, degree = args
    rng = np.random.default_rng(seed_seq)
    mu = random_density(rng, degree)
    nu = random_density(rng, degree)
    return inequality_row(mu, nu)


@dataclass
class VerifyReport:
    seed: int
    rows: list
    violations: list
    sharpness: dict = field(default_factory=dict)
    min_slacks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        sharp_ok = all(max(abs(v) for v in s.values()) < 1e-8 for s in self.sharpness.values())
        return not self.violations and sharp_ok


def verify_inequalities(seed: int, n_samples: int, degree: int = 32, jobs: int = 1,
                        floor: float = VIOLATION_FLOOR) -> VerifyReport:
    """Random pairs of arcsine-class densities plus the sharpness family.

    Each sample draws from its own child of ``SeedSequence(seed)``, so the table
    does not depend on ``jobs``.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be nonnegative")
    children = np.random.SeedSequence(seed).spawn(n_samples)
    tasks = [(s, degree) for s in children]
    if jobs > 1 and n_samples > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sample, tasks, chunksize=max(1, n_samples // (4 * jobs))))
    else:
        rows = [_sample(t) for t in tasks]
    for i, r in enumerate(rows):
        r["sample_id"] = i
    keys = ("slack_t", "slack_lsi", "slack_hwi")
    violations = [(r["sample_id"], k, r[k]) for r in rows for k in keys if r[k] < floor]
    sharp = {}
    for c in SHARPNESS_C:
        r = inequality_row(*sharpness_pair(c))
        sharp[c] = {k: r[k] for k in keys}
    mins = {k: min((r[k] for r in rows), default=0.0) for k in keys}
    return VerifyReport(seed, rows, violations, sharp, mins)


def hwi_slack(mu, nu):
    """``sqrt(2 I) W_1 - W_1^2 / 2 - H``; the ``+inf`` marker when ``I`` is infinite."""
    I = fisher_I(mu, nu)
    if I.is_infinite:
        return FunctionalValue.infinite()
    w1 = wasserstein_p(mu, nu, 1)
    return math.sqrt(2.0 * float(I)) * w1 - 0.5 * w1 * w1 - float(entropy_H(mu, nu))


# --- Pinsker failure -----------------------------------------------------------------


def pinsker_failure_table(n_max: int, c: float = 1.0) -> list:
    """``TV`` and ``H`` for ``psi = c phi_n``; ``H / TV^2 = pi^2 / (8n)``."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    rows = []
    for n in range(1, n_max + 1):
        psi = SignedDifference(ChebSeries.basis(n, c))
        tv = float(total_variation(psi))
        H = float(entropy_H(psi))
        rows.append({"n": n, "TV": tv, "H": H, "ratio": H / tv ** 2, "predicted": np.pi ** 2 / (8 * n)})
    return rows


# --- W_p linearization ---------------------------------------------------------------


def floor_density(delta: float) -> BetaDensity:
    """``(delta + (x/2)^8) / Z``: close to ``delta / Z`` around the origin, mass pushed to the edges."""
    if not 0 < delta < 1:
        raise ValueError("floor must lie in (0, 1)")
    Z = delta + 70.0 / 256.0  # beta-mean of (x/2)^8
    return BetaDensity(interpolate(lambda x: (delta + (x / 2.0) ** 8) / Z, 8))


def wp_linearization_sweep(p: float, floor_values=(0.5, 0.2, 0.1, 0.05, 0.02, 0.01),
                           eps: float = 1e-3) -> list:
    """``W_p^2(mu, nu_eps) / H(mu, nu_eps)`` with ``nu_eps = (phi_delta + eps x) beta``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    rows = []
    for delta in floor_values:
        mu = floor_density(delta)
        nu = BetaDensity(ChebSeries(mu.coeffs + np.pad([0.0, 2.0 * eps], (0, mu.coeffs.size - 2))))
        wp = wasserstein_p(mu, nu, p)
        H = float(entropy_H(mu, nu))
        rows.append({"floor": delta, "Wp": wp, "H": H, "ratio": wp * wp / H})
    return rows


# --- L^p information on the geometric family ------------------------------------------


def truncation_order(r: float) -> int:
    return int(min(math.ceil(40.0 / (1.0 - r)), 1_000_000))


def geometric_family(r: float, eta: float, n_terms: int | None = None) -> SignedDifference:
    """``psi = eta sum_{n>=1} r^{n-1} phi_n`` truncated at ``n_terms``."""
    n_terms = n_terms or truncation_order(r)
    g = np.zeros(n_terms + 1)
    g[1:] = eta * r ** np.arange(n_terms)
    return SignedDifference(ChebSeries(g))


def geometric_entropy(r: float, eta: float, n_terms: int | None = None) -> float:
    n_terms = n_terms or truncation_order(r)
    n = np.arange(1, n_terms + 1)
    return float(np.sum((eta * r ** (n - 1.0)) ** 2 / (2.0 * n)))


def geometric_lp_integral(r: float, p: float, eta: float = 1.0, order: int = 32) -> float:
    """``int |H(mu - nu)|^p d alpha`` with ``|H| = eta / (1 - r x + r^2)``.

    ``x = 2 - 4u`` and ``u = sin^2 t`` give
    ``(8/pi) eta^p (4r)^-p int_0^{pi/2} 2 sin^2 t cos^2 t / (sin^2 t + e)^p dt``
    with ``e = (1 - r)^2 / (4r)``; panels grow geometrically from ``t = 0``
    on the scale ``sqrt(e)`` of the peak.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    e = (1.0 - r) ** 2 / (4.0 * r)
    s = math.sqrt(e)
    inner = s * 2.0 ** np.arange(-6, 60)
    edges = np.concatenate([[0.0], inner[inner < np.pi / 2], [np.pi / 2]])
    xg, wg = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1], edges[1:]
    t = (0.5 * (b - a)[:, None] * (xg + 1.0) + a[:, None]).ravel()
    w = (0.5 * (b - a)[:, None] * wg).ravel()
    st, ct = np.sin(t), np.cos(t)
    f = 2.0 * st * st * ct * ct / (st * st + e) ** p
    return float(8.0 / np.pi * eta ** p * (4.0 * r) ** (-p) * np.sum(w * f))


def lp_bound(r: float, p: float, eta: float = 1.0) -> float:
    """``16 eta^p / (4r)^p int_0^1 u^(1/2 - p) du``, finite for ``p < 3/2``."""
    if p >= 1.5:
        return math.inf
    return 16.0 * eta ** p / (4.0 * r) ** p / (1.5 - p)


@dataclass
class LpTable:
    p: float
    eta: float
    rows: list
    slope: float | None = None
    intercept: float | None = None


def lp_explorer(p: float, r_values, eta: float = 1.0) -> LpTable:
    """Entropy, ``L^p`` integral and their ratio along the geometric family."""
    if p < 1:
        raise ValueError("p must be at least 1")
    r_values = [float(r) for r in r_values]
    if any(not 0 < r < 1 for r in r_values):
        raise ValueError("r must lie in (0, 1)")
    rows = []
    for r in r_values:
        N = truncation_order(r)
        H = geometric_entropy(r, eta, N)
        integral = geometric_lp_integral(r, p, eta)
        rows.append({
            "r": r, "terms": N, "tail_bound": eta * r ** N / (1.0 - r), "H": H,
            "lp_integral": integral, "lp_information": integral ** (2.0 / p),
            "ratio": H / integral ** (2.0 / p), "bound": lp_bound(r, p, eta),
        })
    table = LpTable(p, eta, rows)
    if len(rows) >= 2:
        xs = -np.log1p(-np.array(r_values))
        ys = np.array([row["lp_integral"] for row in rows])
        table.slope, table.intercept = (float(v) for v in np.polyfit(xs, ys, 1))
    return table


# --- trigonometric reformulation ------------------------------------------------------


TRIG_DIRECT_MAX = 256


def trig_ratio(a, p: float, order: int = 48) -> float:
    """``(int_0^pi |sum a_k sin kt|^p sin^(2-p) t dt)^(2/p) / sum a_k^2 / k``."""
    a = np.asarray(a, dtype=float).ravel()
    if p < 1:
        raise ValueError("p must be at least 1")
    if not np.any(a):
        raise ValueError("coefficient vector must be nonzero")
    k = np.arange(1, a.size + 1)
    if a.size > TRIG_DIRECT_MAX:
        # long series: sum a_k sin(kt) on a uniform grid by DST-I, then the trapezoid rule
        m = max(1 << 20, 1 << int(np.ceil(np.log2(64 * a.size))))
        s = np.abs(sp_fft.dst(np.r_[a, np.zeros(m - a.size)], type=1)) / 2.0
        t = np.pi * np.arange(1, m + 1) / (m + 1)
        integral = np.pi / (m + 1) * np.sum(s ** p * np.sin(t) ** (2.0 - p))
        return float(integral ** (2.0 / p) / np.sum(a * a / k))
    # sum a_k sin(kt) = sin(t) sum a_k U_{k-1}(cos t)
    roots = SecondKindSeries(a).real_roots()
    cuts = np.sort(np.arccos(np.clip(roots / 2.0, -1.0, 1.0)))
    # geometric grading towards both ends, where sin^(2-p) and |.|^p are not smooth
    grade = np.pi / 2 * 2.0 ** -np.arange(1, 40)
    edges = np.unique(np.concatenate([[0.0, np.pi / 2, np.pi], grade, np.pi - grade, cuts]))
    xg, wg = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    t = (0.5 * (hi - lo)[:, None] * (xg + 1.0) + lo[:, None]).ravel()
    w = (0.5 * (hi - lo)[:, None] * wg).ravel()
    s = np.abs(np.sin(np.outer(t, k)) @ a)
    integral = np.sum(w * s ** p * np.sin(t) ** (2.0 - p))
    return float(integral ** (2.0 / p) / np.sum(a * a / k))


def trig_ratio_infimum(p: float, degree: int = 8, n_starts: int = 8, seed: int = 0) -> dict:
    """Smallest ``trig_ratio`` found by local minimization from random starts (evidence only)."""
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_starts):
        x0 = rng.normal(size=degree) * 0.9 ** np.arange(degree)
        res = optimize.minimize(lambda a: trig_ratio(a, p) if np.any(a) else np.inf, x0,
                                method="Nelder-Mead", options={"maxiter": 400 * degree, "xatol": 1e-8,
                                                               "fatol": 1e-12})
        if best is None or res.fun < best.fun:
            best = res
    geo = {r: trig_ratio(r ** np.arange(truncation_order(r) if r < 0.99 else 4000), p)
           for r in (0.5, 0.9, 0.99)}
    return {"p": p, "degree": degree, "infimum": float(best.fun), "argmin": best.x.tolist(),
            "geometric": geo}


# --- semigroup flow ------------------------------------------------------------------


def semigroup_flow(mu, nu=None, t_grid=(0.0, 0.1, 0.5, 1.0, 2.0), step: float = 1e-4) -> list:
    """``H`` and ``I`` along ``P_t``; ``dH/dt`` by centered differences against ``-2 I``."""
    psi = SignedDifference.of(mu, nu) if nu is not None else mu
    base = psi.coeffs

    def H_at(t):
        return float(entropy_H(SignedDifference(semigroup(base, t))))

    rows = []
    for t in t_grid:
        if t < 0:
            raise ValueError("semigroup time must be nonnegative")
        I = float(fisher_I(SignedDifference(semigroup(base, t))))
        if t >= step:
            dH = (H_at(t + step) - H_at(t - step)) / (2.0 * step)
        else:
            dH = (-3 * H_at(t) + 4 * H_at(t + step) - H_at(t + 2 * step)) / (2.0 * step)
        rows.append({"t": t, "H": H_at(t), "I": I, "dH_dt": dH, "minus_2I": -2.0 * I})
    return rows
