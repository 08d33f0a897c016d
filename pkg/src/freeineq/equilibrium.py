"""Equilibrium measures of external fields, the compression map and the global check.

The discrete energy on uniform cells with masses ``w`` is
``E_V(w) = sum_i V(x_i) w_i - sum_ij K_ij w_i w_j`` where ``K_ij`` is the mean of
``log|x - y|`` over cell ``i`` times cell ``j``. It is convex on the simplex and
is minimized by accelerated projected gradient followed by an active-set solve
of the Euler-Lagrange system.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import linalg, optimize

from .functionals import cell_log_kernel, cross_log_kernel, relative_entropy_EV
from .measures import BetaDensity, GridMeasure, ScaledMeasure
from .operators import hilbert
from .oracles import hilbert_of_density
from .transport import wasserstein_p

log = logging.getLogger(__name__)

SUPPORT_THRESHOLD = 1e-8
COMPRESSION_MIN_L = 3.0 ** 0.25


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Potential:
    """External field ``V`` with a quadratic growth certificate.

    ``V(x) >= A x^2`` for ``|x| > B``; ``lower_bound`` bounds ``V`` from below.
    """

    evaluator: Callable
    A: float
    B: float
    lower_bound: float
    derivative: Callable | None = None
    spec: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    @classmethod
    def polynomial(cls, coeffs) -> "Potential":
        c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
        deg = c.size - 1
        if deg < 2 or deg % 2 or c[-1] <= 0:
            raise ValueError("need even degree >= 2 with positive leading coefficient")
        A = c[2] / 2.0 if deg == 2 else 0.5
        # V - A x^2 has positive leading coefficient, so it is positive beyond its last real root
        shifted = c.copy()
        shifted[2] -= A
        roots = P.polyroots(shifted)
        real = roots[np.abs(roots.imag) < 1e-9].real
        B = float(np.max(np.abs(real))) if real.size else 0.0
        crit = P.polyroots(P.polyder(c))
        crit = crit[np.abs(crit.imag) < 1e-9].real
        lower = float(np.min(P.polyval(crit, c))) if crit.size else float(c[0])
        dc = P.polyder(c)
        return cls(lambda x: P.polyval(x, c), float(A), B, lower,
                   derivative=lambda x: P.polyval(np.asarray(x, dtype=float), dc),
                   spec={"kind": "poly", "coeffs": c.tolist()})

    @classmethod
    def double_well(cls, a1: float, a2: float) -> "Potential":
        """``min((x - a1)^2, (x - a2)^2) / 2``."""
        a1, a2 = float(a1), float(a2)

        def V(x):
            return 0.5 * np.minimum((x - a1) ** 2, (x - a2) ** 2)

        def dV(x):
            x = np.asarray(x, dtype=float)
            return np.where(np.abs(x - a1) <= np.abs(x - a2), x - a1, x - a2)

        # (x - a)^2 / 2 >= x^2 / 4 outside |x| <= (2 + sqrt 2)|a|
        B = (2.0 + np.sqrt(2.0)) * max(abs(a1), abs(a2))
        return cls(V, 0.25, float(B), 0.0, derivative=dV,
                   spec={"kind": "double_well", "a1": a1, "a2": a2})

    def default_interval(self) -> tuple[float, float]:
        return (-2.0 * self.B - 4.0, 2.0 * self.B + 4.0)

    def check_growth(self, samples) -> bool:
        x = np.asarray(samples, dtype=float)
        v = self(x)
        far = np.abs(x) > self.B
        ok_lower = np.all(v >= self.lower_bound - 1e-12)
        ok_growth = np.all(v[far] / x[far] ** 2 >= self.A / 2.0)
        return bool(ok_lower and ok_growth)


def potential_from_spec(spec: dict) -> Potential:
    kind = spec.get("kind")
    if kind == "poly":
        return Potential.polynomial(spec["coeffs"])
    if kind == "double_well":
        return Potential.double_well(spec["a1"], spec["a2"])
    raise ValueError(f"unknown potential kind {kind!r}")


def _kernel_matvec(h: float, n: int):
    k = cell_log_kernel(h, n)
    return k, (lambda w: linalg.matmul_toeplitz((k, k), w))


@dataclass
class EquilibriumResult:
    measure: GridMeasure
    robin_constant: float
    potential: Potential
    support: tuple[float, float]
    residual: float
    iterations: int = 0

    def effective_potential_cells(self, edges) -> np.ndarray:
        """``U = 2 int log|x - y| mu_V(dy) + K_V`` averaged over each cell of ``edges``."""
        edges = np.asarray(edges, dtype=float)
        own = self.measure.edges
        if edges.size == own.size and np.array_equal(edges, own):
            _, kmul = _kernel_matvec(own[1] - own[0], own.size - 1)
            return 2.0 * kmul(self.measure.weights) + self.robin_constant
        return 2.0 * cross_log_kernel(edges, own) @ self.measure.weights + self.robin_constant

    def effective_potential(self, x) -> np.ndarray:
        """Pointwise ``U(x)`` with ``mu_V`` uniform inside each cell."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        e = self.measure.edges
        a, b = e[None, :-1], e[None, 1:]
        t1, t0 = x[:, None] - a, x[:, None] - b

        def F1(t):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(t == 0.0, 0.0, t * np.log(np.abs(t)) - t)

        mean_log = (F1(t1) - F1(t0)) / (b - a)
        return 2.0 * mean_log @ self.measure.weights + self.robin_constant

    @classmethod
    def from_measure(cls, measure: GridMeasure, V: Potential) -> "EquilibriumResult":
        """Wrap any cell measure as a candidate equilibrium (Robin constant by median)."""
        kv = robin_constant(measure, V)
        res = cls(measure, kv, V, _support(measure), 0.0)
        res.residual = euler_lagrange_residual(res, V)
        return res


def _uniform(measure: GridMeasure) -> float:
    h = np.diff(measure.edges)
    if measure.atomic or not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("equilibrium cells must be uniform")
    return float(h[0])


def _support(measure: GridMeasure) -> tuple[float, float]:
    on = np.flatnonzero(measure.weights > SUPPORT_THRESHOLD)
    e = measure.edges
    return (float(e[on[0]]), float(e[on[-1] + 1]))


def _cell_field(measure: GridMeasure, V: Potential) -> np.ndarray:
    """``V(x_i) - 2 sum_j K_ij w_j``; equals ``K_V`` on the support at equilibrium."""
    h = _uniform(measure)
    _, kmul = _kernel_matvec(h, measure.nodes.size)
    return V(measure.nodes) - 2.0 * kmul(measure.weights)


def robin_constant(measure: GridMeasure, V: Potential) -> float:
    n = measure.nodes.size
    g = _cell_field(measure, V)
    heavy = measure.weights > 1e-3 / n
    return float(np.median(g[heavy]))


def euler_lagrange_residual(eq: EquilibriumResult, V: Potential | None = None) -> float:
    """Largest violation of ``V = U`` on the support and ``V >= U`` off it."""
    V = V or eq.potential
    diff = _cell_field(eq.measure, V) - eq.robin_constant  # V - U per cell
    on = eq.measure.weights > SUPPORT_THRESHOLD
    on_err = np.max(np.abs(diff[on])) if np.any(on) else 0.0
    off_err = np.max(np.maximum(0.0, -diff[~on])) if np.any(~on) else 0.0
    return float(max(on_err, off_err))


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{w >= 0, sum w = 1}`` by sorting."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, y.size + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    return np.maximum(y - css[rho] / (rho + 1), 0.0)


def discrete_energy(w, v, kmul) -> float:
    return float(v @ w - w @ kmul(w))


def _kkt_polish(w, v, k, max_rounds=60):
    """Solve ``2 K_SS w_S + lam = V_S``, ``sum w_S = 1`` on an active set ``S``."""
    n = w.size
    Kfull = linalg.toeplitz(k)
    S = w > SUPPORT_THRESHOLD
    for _ in range(max_rounds):
        idx = np.flatnonzero(S)
        m = idx.size
        M = np.zeros((m + 1, m + 1))
        M[:m, :m] = 2.0 * Kfull[np.ix_(idx, idx)]
        M[:m, m] = 1.0
        M[m, :m] = 1.0
        sol = linalg.solve(M, np.concatenate([v[idx], [1.0]]))
        ws, lam = sol[:m], sol[m]
        if np.any(ws < 0):
            S[idx[ws < 0]] = False
            continue
        w = np.zeros(n)
        w[idx] = ws
        g = v - 2.0 * Kfull @ w
        viol = (~S) & (g < lam - 1e-12)
        if not np.any(viol):
            return w, lam
        S |= viol
    return None, None


def solve_equilibrium(V: Potential, interval=None, n_cells: int = 2000, tol: float = 1e-8,
                      max_iter: int = 50_000, polish_every: int = 500) -> EquilibriumResult:
    """Minimize the discretized weighted energy over the probability simplex."""
    if n_cells < 2:
        raise ValueError("need at least two cells")
    a, b = interval if interval is not None else V.default_interval()
    edges = np.linspace(a, b, n_cells + 1)
    x = 0.5 * (edges[:-1] + edges[1:])
    h = (b - a) / n_cells
    k, kmul = _kernel_matvec(h, n_cells)
    v = V(x)

    def f(w):
        return discrete_energy(w, v, kmul)

    def grad(w):
        return v - 2.0 * kmul(w)

    w = np.full(n_cells, 1.0 / n_cells)
    y, t, lip = w.copy(), 1.0, 1.0
    fw = f(w)
    it = 0
    final = None
    for it in range(1, max_iter + 1):
        gy, fy = grad(y), f(y)
        while True:  # Armijo-type backtracking on the quadratic upper model
            z = project_simplex(y - gy / lip)
            d = z - y
            fz = f(z)
            if fz <= fy + gy @ d + 0.5 * lip * (d @ d) + 1e-15 * abs(fy):
                break
            lip *= 2.0
        pg = lip * np.linalg.norm(z - y)
        if fz > fw and t > 1.0:  # adaptive restart, only when momentum is active
            y, t = w.copy(), 1.0
            continue
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = z + (t - 1.0) / t_next * (z - w)
        w, fw, t = z, fz, t_next
        lip *= 0.95
        if pg < tol or it % polish_every == 0:
            wp, lam = _kkt_polish(w, v, k)
            if wp is not None:
                g = grad(wp)
                on = wp > 0
                kkt = max(np.max(np.abs(g[on] - lam)), np.max(np.maximum(0.0, lam - g[~on]), initial=0.0))
                if kkt < tol:
                    final = wp
                    break
            if pg < tol:
                final = w
                break
    if final is None:
        raise ConvergenceError("equilibrium solver did not converge", pg)
    measure = GridMeasure.uniform_cells((a, b), final)
    res = EquilibriumResult(measure, robin_constant(measure, V), V, _support(measure), 0.0, it)
    res.residual = euler_lagrange_residual(res, V)
    log.debug("equilibrium: %d iterations, residual %.3e", it, res.residual)
    return res


# --- compression map ----------------------------------------------------------------


@dataclass(frozen=True)
class CompressionMap:
    """Odd increasing map of ``(-sqrt(3) L, sqrt(3) L)`` onto the line, identity on ``[-L, L]``."""

    L: float

    def __post_init__(self):
        if not self.L >= COMPRESSION_MIN_L:
            raise ValueError(f"L must be at least 3^(1/4), got {self.L}")

    @property
    def edge(self) -> float:
        return np.sqrt(3.0) * self.L

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) >= self.edge):
            raise ValueError("argument outside (-sqrt(3) L, sqrt(3) L)")
        return x

    def __call__(self, x):
        x = self._check(x)
        L = self.L
        out = np.sign(x) * 2.0 * L ** 3 / (3.0 * L * L - x * x)
        return np.where(np.abs(x) <= L, x, out)

    def derivative(self, x):
        x = self._check(x)
        L = self.L
        out = 4.0 * L ** 3 * np.abs(x) / (3.0 * L * L - x * x) ** 2
        return np.where(np.abs(x) <= L, 1.0, out)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        L = self.L
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.sign(y) * np.sqrt(np.maximum(3.0 * L * L - 2.0 * L ** 3 / np.abs(y), 0.0))
        return np.where(np.abs(y) <= L, y, out)

    def check_properties(self, n: int = 200) -> dict:
        """Evaluate the five structural properties on an ``n``-point sample.

        The log-ratio bound is reported twice: as written (with ``log``) and
        with ``log+ = max(log, 0)`` on the right-hand side.
        """
        L, e = self.L, self.edge
        x = np.linspace(-e, e, n + 2)[1:-1]
        phi, dphi = self(x), self.derivative(x)
        neg = x <= 0
        props = {
            "odd": bool(np.allclose(self(-x), -phi, rtol=1e-14, atol=0)),
            "increasing": bool(np.all(np.diff(phi) > 0)),
            "c1_at_L": bool(abs(self.derivative(np.nextafter(L, e)) - 1.0) < 1e-9),
            "derivative_monotone": bool(np.all(np.diff(dphi[neg]) <= 1e-12)
                                        and np.all(np.diff(dphi[~neg]) >= -1e-12)),
            "blows_up": bool(self(e * (1.0 - 1e-12)) > 1e6),
            "identity_inside": bool(np.array_equal(self(x[np.abs(x) <= L]), x[np.abs(x) <= L])),
        }
        X, Y = np.meshgrid(x, x, indexing="ij")
        far = (np.maximum(np.abs(X), np.abs(Y)) >= L) & (X != Y)
        with np.errstate(divide="ignore"):
            lhs = np.log(np.abs((self(X) - self(Y)) / np.where(X == Y, 1.0, X - Y)))
            lx, ly = np.log(np.abs(self(X))), np.log(np.abs(self(Y)))
        literal = lhs <= 2 * lx + 2 * ly + 1e-12
        plus = lhs <= 2 * np.maximum(lx, 0) + 2 * np.maximum(ly, 0) + 1e-12
        props["log_ratio_literal"] = bool(np.all(literal[far]))
        props["log_ratio_logplus"] = bool(np.all(plus[far]))
        bad = np.argwhere(far & ~literal)
        props["literal_counterexample"] = (tuple(map(float, (X[tuple(bad[0])], Y[tuple(bad[0])])))
                                           if bad.size else None)
        return props


def compression_map(L: float) -> CompressionMap:
    return CompressionMap(float(L))


# --- global transportation check -----------------------------------------------------


def chain_constant(A: float, L: float) -> float:
    """``2A / (12 A L^2 + 9)``."""
    return 2.0 * A / (12.0 * A * L * L + 9.0)


@dataclass
class GrowthCertificate:
    """``V - U >= A x^2`` for ``|x| >= B`` and the admissible ``L``."""

    A: float
    B: float
    L: float
    support_radius: float
    constant: float
    sensitivity: dict


def certify_growth(V: Potential, eq: EquilibriumResult) -> GrowthCertificate:
    """Certify ``V - U >= (A/2) x^2`` off ``[-B', B']`` and pick ``L``.

    Uses ``U(x) <= 2 log(|x| + s) + K_V`` with ``s`` the support radius of
    ``mu_V`` and ``V >= A x^2`` beyond ``B``; ``B'`` is the last zero of
    ``(A/2) x^2 - 2 log(x + s) - K_V``. ``L`` is the smallest value with
    ``L >= B'``, ``supp mu_V in [-L/2, L/2]`` and ``L >= 3^(1/4)``.
    """
    s = max(abs(eq.support[0]), abs(eq.support[1]))
    A = V.A / 2.0
    kv = eq.robin_constant

    def gap(x):
        return 0.5 * A * x * x - 2.0 * np.log(x + s) - kv

    hi = max(V.B, 1.0)
    while gap(hi) <= 0 or np.any(gap(np.linspace(hi, 4 * hi, 64)) <= 0):
        hi *= 2.0
    lo = max(V.B, 1e-9)
    b_eq = optimize.brentq(gap, lo, hi) if gap(lo) < 0 else lo
    b_eq = max(b_eq, V.B)
    L = max(b_eq, 2.0 * s, COMPRESSION_MIN_L)
    sens = {f"{m:g}L": chain_constant(A, m * L) for m in (1.0, 1.5, 2.0)}
    return GrowthCertificate(A, b_eq, L, s, chain_constant(A, L), sens)


@dataclass
class TransportCheckReport:
    rows: list
    skipped: list
    certificate: GrowthCertificate
    empirical_constant: float | None
    passed: bool
    min_relative_entropy: float


def global_transport_check(V: Potential, eq: EquilibriumResult, test_measures) -> TransportCheckReport:
    """Ratios ``E_V(mu|mu_V) / W_1^2`` against the explicit chain constant."""
    cert = certify_growth(V, eq)
    rows, skipped = [], []
    for name, mu in test_measures:
        if isinstance(mu, GridMeasure) and mu.atomic:
            skipped.append((name, "atomic measure"))
            continue
        w1 = wasserstein_p(mu, eq.measure, 1)
        ev = float(relative_entropy_EV(mu, eq))
        if w1 < 1e-9:
            skipped.append((name, "ratio undefined (0/0)"))
            continue
        rows.append({"name": name, "W1": w1, "E_V": ev, "ratio": ev / w1 ** 2})
    ratios = [r["ratio"] for r in rows]
    emp = min(ratios) if ratios else None
    min_ev = min((r["E_V"] for r in rows), default=0.0)
    passed = emp is not None and emp > cert.constant
    return TransportCheckReport(rows, skipped, cert, emp, passed, min_ev)


def _cells_from_cdf(cdf, edges) -> np.ndarray:
    w = np.diff(cdf(edges))
    return np.clip(w, 0.0, None) / np.sum(np.clip(w, 0.0, None))


def transport_test_family(eq: EquilibriumResult, rng: np.random.Generator | None = None,
                          n_random: int = 4) -> list:
    """Translates, dilations and mixtures of ``mu_V`` plus arcsine-class measures on its cells."""
    rng = rng or np.random.default_rng(0)
    mv = eq.measure
    edges = mv.edges
    a, b = edges[0], edges[-1]
    c = 0.5 * (eq.support[0] + eq.support[1])
    F = mv.cdf_extended
    out = [("mu_V", mv)]
    for d in (0.05, 0.2, 0.5, 1.0, 2.0):
        out.append((f"translate {d:g}", GridMeasure.uniform_cells((a, b), _cells_from_cdf(
            lambda x, d=d: F(x - d), edges))))
    for s in (0.8, 1.2, 1.5):
        out.append((f"dilate {s:g}", GridMeasure.uniform_cells((a, b), _cells_from_cdf(
            lambda x, s=s: F(c + (x - c) / s), edges))))
    half = 0.25 * (eq.support[1] - eq.support[0])
    arcsine = ScaledMeasure(BetaDensity.arcsine(), half, c)
    aw = _cells_from_cdf(arcsine.cdf_extended, edges)
    out.append(("arcsine on support", GridMeasure.uniform_cells((a, b), aw)))
    for lam in (0.1, 0.5):
        out.append((f"mixture {lam:g}", GridMeasure.uniform_cells((a, b), (1 - lam) * mv.weights + lam * aw)))
    wide = ScaledMeasure(BetaDensity.semicircle(), 0.45 * (b - a) / 2.0, 0.5 * (a + b))
    out.append(("wide semicircle", GridMeasure.uniform_cells((a, b), _cells_from_cdf(wide.cdf_extended, edges))))
    from .measures import random_density
    for i in range(n_random):
        base = random_density(rng, degree=16)
        m = ScaledMeasure(base, half * rng.uniform(0.7, 1.6), c + rng.uniform(-0.5, 0.5))
        out.append((f"random {i}", GridMeasure.uniform_cells((a, b), _cells_from_cdf(m.cdf_extended, edges))))
    return out


# --- double well ---------------------------------------------------------------------


@dataclass
class DoubleWellReport:
    a1: float
    a2: float
    hilbert_error: tuple[float, float]
    oracle_error: tuple[float, float]
    fisher_integrals: tuple[float, float]
    w1_between: float

    @property
    def certified(self) -> bool:
        return max(self.hilbert_error) < 1e-6


def double_well_demo(a1: float = -3.0, a2: float = 3.0, n_points: int = 401) -> DoubleWellReport:
    """Two translated semicircles that both satisfy ``H mu = V'`` on their supports."""
    if abs(a1 - a2) <= 4:
        raise ValueError("wells must be more than 4 apart")
    V = Potential.double_well(a1, a2)
    sc = BetaDensity.semicircle()
    H = hilbert(sc)
    errs, oracle, fisher = [], [], []
    u, wu = np.polynomial.legendre.leggauss(64)
    for a in (a1, a2):
        x = a + np.linspace(-2.0, 2.0, n_points)[1:-1]
        errs.append(float(np.max(np.abs(H(x - a) - V.derivative(x)))))
        xs = a + np.linspace(-1.9, 1.9, 9)
        pv = np.array([hilbert_of_density(lambda y, a=a: np.sqrt(4 - (y - a) ** 2) / (2 * np.pi),
                                          a - 2, a + 2, xi) for xi in xs])
        oracle.append(float(np.max(np.abs(pv - V.derivative(xs)))))
        # int (H mu - V')^2 d mu in theta, x = a + 2 cos(theta)
        th = 0.5 * np.pi * (u + 1.0)
        xx = a + 2.0 * np.cos(th)
        integrand = (H(xx - a) - V.derivative(xx)) ** 2 * (2.0 / np.pi) * np.sin(th) ** 2
        fisher.append(float(0.5 * np.pi * np.sum(wu * integrand)))
    m1 = ScaledMeasure(sc, 1.0, a1)
    m2 = ScaledMeasure(sc, 1.0, a2)
    w1 = wasserstein_p(m1, m2, 1, method="quantile")
    return DoubleWellReport(a1, a2, tuple(errs), tuple(oracle), tuple(fisher), w1)
