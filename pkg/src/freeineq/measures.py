"""Probability measures on compact intervals.

Three carriers are used throughout:

* :class:`BetaDensity` -- ``mu = f d beta`` with ``f`` a Chebyshev series on [-2, 2];
* :class:`ScaledMeasure` -- the pushforward of a :class:`BetaDensity` under
  ``x -> center + L x`` (lives on ``[center - 2L, center + 2L]``);
* :class:`GridMeasure` -- weights on an ordered grid, either cell based
  (piecewise constant density on the Voronoi cells of the nodes) or atomic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .chebyshev import ChebSeries, beta_rule, default_nodes

NONNEG_TOL = 1e-9


def _theta(x):
    return np.arccos(np.clip(np.asarray(x, dtype=float) / 2.0, -1.0, 1.0))


def _cdf_theta(coeffs: np.ndarray, theta):
    """CDF of ``f d beta`` at ``x = 2 cos(theta)``.

    ``F = ((pi - theta) gamma_0 - sum_n gamma_n sin(n theta) / n) / pi``. The sine
    series enters with a minus sign; with a plus sign ``1 + x/2`` would put more
    than half its mass left of the origin.
    """
    theta = np.asarray(theta, dtype=float)
    # sum_n (gamma_n / n) sin(n theta) = sin(theta) sum_n (gamma_n / n) U_{n-1}(cos theta), by Clenshaw
    c = coeffs[1:] / np.arange(1, coeffs.size)
    u2 = 2.0 * np.cos(theta)
    b1 = np.zeros_like(theta)
    b2 = np.zeros_like(theta)
    for ck in c[::-1]:
        b1, b2 = ck + u2 * b1 - b2, b1
    return ((np.pi - theta) * coeffs[0] - np.sin(theta) * b1) / np.pi


@dataclass(frozen=True)
class BetaDensity:
    """Probability measure ``density(x) beta(dx)`` on [-2, 2]."""

    density: ChebSeries
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.density, ChebSeries):
            object.__setattr__(self, "density", ChebSeries(self.density))
        if self.check:
            c0 = self.density.coeffs[0]
            if abs(c0 - 1.0) > 1e-12:
                raise ValueError(f"density must have unit mass, got constant term {c0}")
            if self.min_density() < -NONNEG_TOL:
                raise ValueError("density is negative somewhere on [-2, 2]")

    @classmethod
    def from_coeffs(cls, coeffs) -> "BetaDensity":
        return cls(ChebSeries(coeffs))

    @classmethod
    def arcsine(cls) -> "BetaDensity":
        return cls(ChebSeries([1.0]))

    @classmethod
    def semicircle(cls) -> "BetaDensity":
        # d alpha / d beta = (4 - x^2) / 2 = 1 - phi_2
        return cls(ChebSeries([1.0, 0.0, -1.0]))

    @property
    def coeffs(self) -> np.ndarray:
        return self.density.coeffs

    @property
    def support(self) -> tuple[float, float]:
        return (-2.0, 2.0)

    def min_density(self) -> float:
        k = default_nodes(self.density.degree)
        nodes = beta_rule(k).nodes
        dense = np.linspace(-2.0, 2.0, 10 * k + 1)
        return float(min(self.density(nodes).min(), self.density(dense).min()))

    def pdf(self, x):
        """Lebesgue density on the open interval."""
        x = np.asarray(x, dtype=float)
        return self.density(x) / (np.pi * np.sqrt(4.0 - x * x))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > 2.0):
            raise ValueError("cdf argument outside [-2, 2]")
        return np.clip(_cdf_theta(self.coeffs, _theta(x)), 0.0, 1.0)

    def cdf_extended(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 2.0, 1.0, 0.0)
        inside = np.abs(x) < 2.0
        if np.any(inside):
            out = np.where(inside, self.cdf(np.clip(x, -2.0, 2.0)), out)
        return out

    @cached_property
    def _theta_table(self):
        grid = np.linspace(0.0, np.pi, 4097)
        return grid, _cdf_theta(self.coeffs, grid)

    def quantile(self, t):
        """Left-continuous inverse of the CDF, by bisection then Newton in ``theta``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        # bracket from a table of F on a theta grid; F decreases in theta
        grid, table = self._theta_table
        k = np.clip(np.searchsorted(-table, -t, side="right"), 1, grid.size - 1)
        lo, hi = grid[k - 1], grid[k]
        # Newton in theta (dF/dtheta = -f(2 cos theta) / pi) kept inside the bracket
        # F(lo) >= t > F(hi); steps leaving it fall back to bisection
        th = 0.5 * (lo + hi)
        for _ in range(8):
            F = _cdf_theta(self.coeffs, th)
            if np.all(np.abs(F - t) <= 1e-15):
                break
            above = F >= t
            lo = np.where(above, th, lo)
            hi = np.where(above, hi, th)
            dens = self.density(2.0 * np.cos(th)) / np.pi
            with np.errstate(divide="ignore", invalid="ignore"):
                trial = th + (F - t) / dens
            inside = np.isfinite(trial) & (trial >= lo) & (trial <= hi)
            th = np.where(inside, trial, 0.5 * (lo + hi))
        lo = th
        x = 2.0 * np.cos(lo)
        x = np.where(t <= 0.0, -2.0, np.where(t >= 1.0, 2.0, x))
        return x if x.size > 1 else x[0]


@dataclass(frozen=True)
class SignedDifference:
    """Density of ``mu - nu`` against the arcsine law (zero total mass)."""

    coeffs: ChebSeries

    def __post_init__(self):
        if not isinstance(self.coeffs, ChebSeries):
            object.__setattr__(self, "coeffs", ChebSeries(self.coeffs))
        if abs(self.coeffs.coeffs[0]) > 1e-12:
            raise ValueError("a difference of probability densities has zero mean")

    @classmethod
    def of(cls, mu: BetaDensity, nu: BetaDensity) -> "SignedDifference":
        d = (mu.density - nu.density).coeffs.copy()
        d[0] = 0.0
        return cls(ChebSeries(d))

    @property
    def gamma(self) -> np.ndarray:
        return self.coeffs.coeffs


def difference(mu, nu) -> SignedDifference:
    if isinstance(mu, SignedDifference):
        return mu
    return SignedDifference.of(mu, nu)


@dataclass(frozen=True)
class ScaledMeasure:
    """Pushforward of ``base`` under ``x -> center + half_width * x``."""

    base: BetaDensity
    half_width: float
    center: float = 0.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - 2 * self.half_width, self.center + 2 * self.half_width)

    def to_base(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.half_width

    def cdf_extended(self, x):
        return self.base.cdf_extended(self.to_base(x))

    def quantile(self, t):
        return self.center + self.half_width * np.asarray(self.base.quantile(t))

    def density_wrt_reference(self, x):
        """``d mu / d beta_L`` where ``beta_L`` is the arcsine law on the support."""
        return self.base.density(self.to_base(x))


@dataclass(frozen=True)
class GridMeasure:
    """Probability weights on an ordered grid inside ``interval``.

    Cell-based measures spread each weight uniformly over the Voronoi cell of
    its node (clipped to ``interval``); atomic ones are sums of point masses.
    """

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    atomic: bool = False

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        a, b = map(float, self.interval)
        if nodes.size != weights.size or nodes.size == 0:
            raise ValueError("nodes and weights must be nonempty and of equal length")
        if self.atomic:
            if np.any(np.diff(nodes) < 0):
                raise ValueError("nodes must be sorted")
        elif np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {weights.sum()!r}")
        if nodes[0] < a or nodes[-1] > b:
            raise ValueError("nodes must lie inside the interval")
        for arr in (nodes, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "interval", (a, b))

    @classmethod
    def uniform_cells(cls, interval, weights) -> "GridMeasure":
        a, b = interval
        n = len(weights)
        edges = np.linspace(a, b, n + 1)
        return cls(0.5 * (edges[1:] + edges[:-1]), weights, (a, b))

    @classmethod
    def from_samples(cls, points) -> "GridMeasure":
        pts = np.sort(np.asarray(points, dtype=float).ravel())
        return cls(pts, np.full(pts.size, 1.0 / pts.size), (pts[0], pts[-1]), atomic=True)

    @property
    def edges(self) -> np.ndarray:
        a, b = self.interval
        mids = 0.5 * (self.nodes[1:] + self.nodes[:-1])
        return np.concatenate([[a], mids, [b]])

    @property
    def support(self) -> tuple[float, float]:
        if self.atomic:
            return (float(self.nodes[0]), float(self.nodes[-1]))
        return self.interval

    def cdf_extended(self, x):
        x = np.asarray(x, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        cum[-1] = 1.0
        if self.atomic:
            idx = np.searchsorted(self.nodes, x, side="right")
            return cum[idx]
        return np.interp(x, self.edges, cum, left=0.0, right=1.0)

    def quantile(self, t):
        t = np.asarray(t, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        cum[-1] = 1.0
        if self.atomic:
            idx = np.searchsorted(cum[1:], t, side="left")
            return self.nodes[np.clip(idx, 0, self.nodes.size - 1)]
        edges = self.edges
        # first knot with F >= t; the segment before it carries positive mass
        j = np.clip(np.searchsorted(cum, t, side="left"), 1, cum.size - 1)
        f0, f1 = cum[j - 1], cum[j]
        frac = np.clip((t - f0) / np.where(f1 > f0, f1 - f0, 1.0), 0.0, 1.0)
        return edges[j - 1] + frac * (edges[j] - edges[j - 1])


def cdf(mu, x):
    """Distribution function, ``F(x) = mu((-inf, x])``."""
    if isinstance(mu, BetaDensity):
        return mu.cdf(x)
    return mu.cdf_extended(x)


def quantile(mu, t):
    """Generalized inverse ``inf{x : F(x) >= t}``."""
    return mu.quantile(t)


def rescale(mu, L: float, center: float = 0.0):
    """Pushforward under ``x -> center + L x``."""
    if not L > 0:
        raise ValueError("L must be positive")
    if isinstance(mu, BetaDensity):
        return ScaledMeasure(mu, float(L), float(center))
    if isinstance(mu, ScaledMeasure):
        return ScaledMeasure(mu.base, mu.half_width * L, center + L * mu.center)
    if isinstance(mu, GridMeasure):
        a, b = mu.interval
        return GridMeasure(center + L * mu.nodes, mu.weights, (center + L * a, center + L * b), mu.atomic)
    raise TypeError(f"cannot rescale {type(mu).__name__}")


def grid_from_density(mu, n_cells: int, interval=None) -> GridMeasure:
    """Cell masses from exact CDF differences on ``n_cells`` equal cells."""
    if n_cells < 2:
        raise ValueError("need at least two cells")
    a, b = map(float, interval if interval is not None else mu.support)
    edges = np.linspace(a, b, n_cells + 1)
    w = np.clip(np.diff(mu.cdf_extended(edges)), 0.0, None)
    return GridMeasure(0.5 * (edges[1:] + edges[:-1]), w / w.sum(), (a, b))


def random_density(rng: np.random.Generator, degree: int = 32, rho: float | None = None,
                   floor: float = 0.01) -> BetaDensity:
    """Smooth strictly positive density with geometrically decaying random coefficients."""
    if rho is None:
        rho = rng.uniform(0.2, 0.95)
    n = np.arange(degree + 1)
    g = rng.uniform(-1.0, 1.0, degree + 1) * rho ** n
    g[0] = 1.0
    f = ChebSeries(g)
    k = default_nodes(degree)
    grid = np.concatenate([beta_rule(k).nodes, np.linspace(-2, 2, 10 * k + 1)])
    m = f(grid).min()
    if m < floor:
        # mix with the arcsine density: keeps unit mass and lifts the minimum to `floor`
        lam = (1.0 - floor) / (1.0 - m)
        g = lam * g
        g[0] = 1.0
    return BetaDensity(ChebSeries(g))


def measure_from_spec(spec: dict):
    kind = spec.get("kind")
    if kind == "cheb":
        return BetaDensity(ChebSeries(spec["coeffs"]))
    if kind == "grid":
        return GridMeasure(spec["nodes"], spec["weights"], tuple(spec["interval"]))
    if kind == "samples":
        return GridMeasure.from_samples(spec["points"])
    raise ValueError(f"unknown measure kind {kind!r}")


def measure_to_spec(mu) -> dict:
    if isinstance(mu, BetaDensity):
        return {"kind": "cheb", "coeffs": mu.coeffs.tolist()}
    if isinstance(mu, GridMeasure):
        if mu.atomic:
            return {"kind": "samples", "points": mu.nodes.tolist()}
        return {"kind": "grid", "nodes": mu.nodes.tolist(), "weights": mu.weights.tolist(),
                "interval": list(mu.interval)}
    raise TypeError(f"no JSON form for {type(mu).__name__}")


def load_measure(path) -> BetaDensity | GridMeasure:
    with open(Path(path)) as fh:
        return measure_from_spec(json.load(fh))
