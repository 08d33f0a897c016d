"""Entropy, Fisher informations and related scalar functionals.

For ``mu - nu = sum_n gamma_n phi_n d beta`` the spectral forms are

* ``H = sum gamma_n^2 / (2n)`` (reduced free entropy, ``<E psi, psi>``),
* ``I = sum gamma_n^2 / 2``  (``L^2(beta)`` distance of the densities),
* ``J = sum gamma_n^2``      (``L^2(alpha)`` distance of the Hilbert transforms).

``J`` is evaluated by quadrature of the Hilbert transforms so that ``J = 2I``
is a check and not an identity of the code.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import matmul_toeplitz

from .chebyshev import alpha_abs_moment, alpha_rule, beta_abs_moment, beta_rule, default_nodes
from .measures import (
    BetaDensity, GridMeasure, ScaledMeasure, SignedDifference, difference, grid_from_density,
)
from .operators import hilbert, hilbert_at


class Method(Enum):
    SPECTRAL = "spectral"
    QUADRATURE = "quadrature"


class InfiniteValueError(ArithmeticError):
    """Raised when an infinite functional is used as a number."""


@dataclass(frozen=True)
class FunctionalValue:
    """A nonnegative functional value or the explicit ``+inf`` state."""

    value: float | None
    method: Method = Method.SPECTRAL

    @classmethod
    def infinite(cls, method: Method = Method.SPECTRAL) -> "FunctionalValue":
        return cls(None, method)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __float__(self) -> float:
        if self.value is None:
            raise InfiniteValueError("functional is +inf")
        return float(self.value)

    def to_json(self):
        return "inf" if self.value is None else float(self.value)


def _spectral_pair(mu, nu) -> np.ndarray:
    """Coefficients ``gamma_1..gamma_N`` of ``d(mu - nu)/d beta``."""
    if isinstance(mu, ScaledMeasure) and isinstance(nu, ScaledMeasure):
        if (mu.half_width, mu.center) != (nu.half_width, nu.center):
            raise ValueError("rescaled measures must share the same interval")
        mu, nu = mu.base, nu.base
    return difference(mu, nu).gamma[1:]


def _is_beta_class(mu) -> bool:
    return isinstance(mu, (BetaDensity, SignedDifference, ScaledMeasure))


def _n(g):
    return np.arange(1, g.size + 1, dtype=float)


def entropy_H(mu, nu=None) -> FunctionalValue:
    """Reduced free entropy ``-iint log|x-y| (mu-nu)(dx) (mu-nu)(dy)``.

    Invariant under a common rescaling since ``mu - nu`` has zero mass.
    """
    if isinstance(mu, GridMeasure) or isinstance(nu, GridMeasure):
        return log_energy(mu, nu)
    g = _spectral_pair(mu, nu)
    return FunctionalValue(float(np.sum(g * g / (2.0 * _n(g)))), Method.SPECTRAL)


def fisher_I(mu, nu=None) -> FunctionalValue:
    """``int (d mu/d beta - d nu/d beta)^2 d beta``; rescaled pairs use ``beta_L``."""
    if isinstance(mu, GridMeasure) or isinstance(nu, GridMeasure):
        return _grid_fisher_I(mu, nu)
    if isinstance(mu, ScaledMeasure):
        return _scaled_fisher_I(mu, nu)
    g = _spectral_pair(mu, nu)
    return FunctionalValue(float(np.sum(g * g) / 2.0), Method.SPECTRAL)


def _scaled_fisher_I(mu: ScaledMeasure, nu: ScaledMeasure) -> FunctionalValue:
    if (mu.half_width, mu.center) != (nu.half_width, nu.center):
        raise ValueError("rescaled measures must share the same interval")
    deg = max(mu.base.density.degree, nu.base.density.degree)
    rule = beta_rule(default_nodes(deg))
    x = mu.center + mu.half_width * rule.nodes  # arcsine nodes on the scaled interval
    d = mu.density_wrt_reference(x) - nu.density_wrt_reference(x)
    return FunctionalValue(rule.integrate(d * d), Method.QUADRATURE)


def fisher_J(mu, nu=None) -> FunctionalValue:
    """``int (H mu - H nu)^2 d alpha`` by semicircle quadrature.

    Rescaled pairs use the semicircle law on their own interval (``J_L``).
    """
    if isinstance(mu, GridMeasure) or isinstance(nu, GridMeasure):
        return _grid_fisher_J(mu, nu)
    if isinstance(mu, ScaledMeasure):
        if (mu.half_width, mu.center) != (nu.half_width, nu.center):
            raise ValueError("rescaled measures must share the same interval")
        deg = max(mu.base.density.degree, nu.base.density.degree)
        rule = alpha_rule(default_nodes(deg))
        x = mu.center + mu.half_width * rule.nodes
        d = hilbert_at(mu, x) - hilbert_at(nu, x)
        return FunctionalValue(rule.integrate(d * d), Method.QUADRATURE)
    psi = difference(mu, nu)
    rule = alpha_rule(default_nodes(psi.coeffs.degree))
    d = hilbert(psi)(rule.nodes)
    return FunctionalValue(rule.integrate(d * d), Method.QUADRATURE)


def lp_information(mu, nu, p: float) -> FunctionalValue:
    """``(int |H mu - H nu|^p d alpha)^(2/p)``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    if not (_is_beta_class(mu) and (nu is None or _is_beta_class(nu))):
        return FunctionalValue.infinite(Method.QUADRATURE)
    q = hilbert(difference(mu, nu))
    return FunctionalValue(alpha_abs_moment(q, p) ** (2.0 / p), Method.QUADRATURE)


def total_variation(mu, nu=None) -> FunctionalValue:
    """``||mu - nu||`` = ``int |d(mu - nu)/d beta| d beta``."""
    if isinstance(mu, GridMeasure) or isinstance(nu, GridMeasure):
        return FunctionalValue(_grid_total_variation(mu, nu), Method.QUADRATURE)
    psi = difference(mu, nu)
    return FunctionalValue(beta_abs_moment(psi.coeffs, 1.0), Method.QUADRATURE)


# --- grid measures -------------------------------------------------------------------

_SERIES_FROM = 8


def _second_antiderivative_log(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 0.5 * t * t * np.log(np.abs(t)) - 0.75 * t * t
    return np.where(t == 0.0, 0.0, out)


def cell_log_kernel(h: float, n: int) -> np.ndarray:
    """Mean of ``log|x - y|`` over two equal cells of width ``h`` that are ``d`` cells apart.

    Exact second differences for small ``d``; the large-``d`` branch uses the
    convergent moment series of the triangular law of ``x - y``.
    """
    d = np.arange(n, dtype=float)
    k = np.empty(n)
    small = d < _SERIES_FROM
    ds = d[small]
    g = lambda m: 0.5 * m * m * np.log(np.where(m > 0, m, 1.0))  # noqa: E731
    k[small] = g(ds + 1) - 2 * g(ds) + g(np.abs(ds - 1)) - 1.5
    dl = d[~small]
    if dl.size:
        corr = np.zeros_like(dl)
        for m in range(1, 13):
            corr -= dl ** (-2.0 * m) / (m * (2 * m + 1) * (2 * m + 2))
        k[~small] = np.log(dl) + corr
    return k + np.log(h)


def cross_log_kernel(edges_a: np.ndarray, edges_b: np.ndarray) -> np.ndarray:
    """Mean of ``log|x - y|`` for every pair of cells from two partitions."""
    a1, b1 = edges_a[:-1, None], edges_a[1:, None]
    a2, b2 = edges_b[None, :-1], edges_b[None, 1:]
    F = _second_antiderivative_log
    tot = F(b1 - a2) - F(a1 - a2) - F(b1 - b2) + F(a1 - b2)
    return tot / ((b1 - a1) * (b2 - a2))


def _uniform_step(edges: np.ndarray):
    h = np.diff(edges)
    if np.allclose(h, h[0], rtol=1e-9, atol=0):
        return float(h[0])
    return None


def _same_cells(mu: GridMeasure, nu: GridMeasure) -> bool:
    return mu.nodes.size == nu.nodes.size and np.array_equal(mu.edges, nu.edges)


def grid_energy_form(edges: np.ndarray, d: np.ndarray, block: int = 1024) -> float:
    """``-iint log|x - y| s(dx) s(dy)`` for the signed cell masses ``d``."""
    h = _uniform_step(edges)
    if h is not None:
        k = cell_log_kernel(h, d.size)
        return float(-d @ matmul_toeplitz((k, k), d))
    total = 0.0
    for i in range(0, d.size, block):
        rows = slice(i, i + block)
        K = cross_log_kernel(edges[i:i + block + 1], edges)
        total += d[rows] @ (K @ d)
    return float(-total)


def _to_grid(mu, like: GridMeasure | None = None, n_cells: int = 2000):
    """Grid form of ``mu``; densities are cut along the cells of ``like`` when it has cells."""
    if isinstance(mu, GridMeasure):
        return mu
    if isinstance(mu, (BetaDensity, ScaledMeasure)):
        if like is not None and not like.atomic:
            lo = min(like.edges[0], mu.support[0])
            hi = max(like.edges[-1], mu.support[1])
            edges = np.union1d(like.edges, [lo, hi])
            w = np.clip(np.diff(mu.cdf_extended(edges)), 0.0, None)
            return GridMeasure(0.5 * (edges[1:] + edges[:-1]), w / w.sum(), (lo, hi))
        return grid_from_density(mu, n_cells)
    raise TypeError(f"no grid form for {type(mu).__name__}")


def _grid_pair(mu, nu):
    if isinstance(mu, GridMeasure):
        return mu, _to_grid(nu, mu)
    nu = _to_grid(nu)
    return _to_grid(mu, nu), nu


def _common_cells(mu: GridMeasure, nu: GridMeasure):
    """Refine both measures onto the union of their cell edges."""
    if _same_cells(mu, nu):
        return mu.edges, mu.weights, nu.weights
    edges = np.union1d(mu.edges, nu.edges)
    return edges, _remass(mu, edges), _remass(nu, edges)


def _remass(mu: GridMeasure, edges: np.ndarray) -> np.ndarray:
    return np.diff(mu.cdf_extended(edges))


def log_energy(mu, nu=None) -> FunctionalValue:
    """Reduced free entropy of two cell-based grid measures.

    Pairs of cells are integrated exactly (piecewise constant densities), so
    the singular diagonal needs no special treatment. Atoms give ``+inf``.
    """
    if nu is None:
        raise ValueError("log_energy needs two measures")
    mu, nu = _grid_pair(mu, nu)
    if mu.atomic or nu.atomic:
        return FunctionalValue.infinite(Method.QUADRATURE)
    edges, w, v = _common_cells(mu, nu)
    return FunctionalValue(grid_energy_form(edges, w - v), Method.QUADRATURE)


def _grid_density_diff(mu, nu):
    mu, nu = _grid_pair(mu, nu)
    if mu.atomic or nu.atomic:
        return None
    edges, w, v = _common_cells(mu, nu)
    return edges, (w - v) / np.diff(edges)


def _grid_total_variation(mu, nu) -> float:
    mu, nu = _grid_pair(mu, nu)
    if mu.atomic or nu.atomic:
        pts = np.union1d(mu.nodes, nu.nodes)
        wm = np.array([mu.weights[mu.nodes == x].sum() for x in pts])
        wn = np.array([nu.weights[nu.nodes == x].sum() for x in pts])
        return float(np.abs(wm - wn).sum())
    edges, w, v = _common_cells(mu, nu)
    return float(np.abs(w - v).sum())


def _inside_reference(edges, dens) -> bool:
    outside = (edges[1:] <= -2.0) | (edges[:-1] >= 2.0) | (edges[:-1] < -2.0) | (edges[1:] > 2.0)
    return not np.any(outside & (dens != 0.0))


def _grid_fisher_I(mu, nu) -> FunctionalValue:
    out = _grid_density_diff(mu, nu)
    if out is None:
        return FunctionalValue.infinite(Method.QUADRATURE)
    edges, dens = out
    if not _inside_reference(edges, dens):
        return FunctionalValue.infinite(Method.QUADRATURE)
    # (d mu/d beta) = pi sqrt(4 - x^2) f(x), squared against beta: pi sqrt(4 - x^2) f^2
    a = np.clip(edges[:-1], -2, 2)
    b = np.clip(edges[1:], -2, 2)
    S = lambda x: 0.5 * (x * np.sqrt(4 - x * x) + 4 * np.arcsin(x / 2))  # noqa: E731
    return FunctionalValue(float(np.pi * np.sum(dens * dens * (S(b) - S(a)))), Method.QUADRATURE)


def grid_hilbert(edges: np.ndarray, dens: np.ndarray, x):
    """Hilbert transform of a piecewise constant density: ``2 sum f_i log|(x-a_i)/(x-b_i)|``."""
    x = np.asarray(x, dtype=float)[..., None]
    a, b = edges[:-1], edges[1:]
    with np.errstate(divide="ignore"):
        terms = np.log(np.abs(x - a)) - np.log(np.abs(x - b))
    return 2.0 * terms @ dens


def _grid_fisher_J(mu, nu, order: int = 16) -> FunctionalValue:
    out = _grid_density_diff(mu, nu)
    if out is None:
        return FunctionalValue.infinite(Method.QUADRATURE)
    edges, dens = out
    if not _inside_reference(edges, dens):
        return FunctionalValue.infinite(Method.QUADRATURE)
    # composite Gauss in theta between the cell edges keeps nodes off the log singularities
    th = np.unique(np.arccos(np.clip(np.concatenate([[-2.0, 2.0], edges]) / 2.0, -1, 1)))
    t, w = np.polynomial.legendre.leggauss(order)
    lo, hi = th[:-1], th[1:]
    u = (0.5 * (hi - lo)[:, None] * (t + 1.0) + lo[:, None]).ravel()
    wu = (0.5 * (hi - lo)[:, None] * w).ravel()
    vals = grid_hilbert(edges, dens, 2.0 * np.cos(u))
    return FunctionalValue(float(2.0 / np.pi * np.sum(wu * vals ** 2 * np.sin(u) ** 2)),
                           Method.QUADRATURE)


def relative_entropy_EV(mu, eq) -> FunctionalValue:
    """``E_V(mu | mu_V) = int (V - U) d mu + H(mu, mu_V)`` for an equilibrium result."""
    mu = _to_grid(mu, eq.measure)
    if mu.atomic:
        return FunctionalValue.infinite(Method.QUADRATURE)
    gap = eq.potential(mu.nodes) - eq.effective_potential_cells(mu.edges)
    h = log_energy(mu, eq.measure)
    return FunctionalValue(float(gap @ mu.weights + h.value), Method.QUADRATURE)
