"""Slow, independent reference computations used to validate the spectral formulas.

Nothing here is used on a production code path; each routine goes back to the
defining integral (log kernel, principal value, Fourier transform, kernel of
the semigroup) with adaptive quadrature.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate, special

from .chebyshev import ChebSeries, beta_rule


def log_potential(f, x: float) -> float:
    """``-int log|x - y| f(y) beta(dy)`` split at the singular point ``y = x``."""
    u0 = float(np.arccos(np.clip(x / 2.0, -1.0, 1.0)))

    def g(u):
        return -np.log(abs(x - 2.0 * np.cos(u))) * f(2.0 * np.cos(u))

    pieces = [(0.0, u0), (u0, np.pi)]
    total = 0.0
    for a, b in pieces:
        if b - a > 0:
            total += integrate.quad(g, a, b, limit=200, epsabs=1e-13, epsrel=1e-13)[0]
    return total / np.pi


def difference_quotient(f, x: float, n_nodes: int = 400) -> float:
    """``int (f(x) - f(y)) / (x - y) beta(dy)`` by an arcsine Gauss rule."""
    rule = beta_rule(n_nodes)
    y = rule.nodes
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (f(x) - f(y)) / (x - y)
    return rule.integrate(q)


def principal_value(f, x: float) -> float:
    """Glauert-type ``p.v. int f(y) / (x - y) beta(dy)`` via a Cauchy-weight rule in ``theta``."""
    u0 = float(np.arccos(x / 2.0))
    lim = f(x) / (2.0 * np.sin(u0))

    def g(u):
        d = x - 2.0 * np.cos(u)
        if abs(u - u0) < 1e-12:
            return lim
        return f(2.0 * np.cos(u)) * (u - u0) / d

    val = integrate.quad(g, 0.0, np.pi, weight="cauchy", wvar=u0, limit=400,
                         epsabs=1e-13, epsrel=1e-13)[0]
    return val / np.pi


def hilbert_of_density(pdf, lo: float, hi: float, x: float) -> float:
    """``p.v. int 2 / (x - y) rho(y) dy`` for a Lebesgue density on ``[lo, hi]``."""
    val = integrate.quad(pdf, lo, hi, weight="cauchy", wvar=x, limit=400,
                         epsabs=1e-13, epsrel=1e-13)[0]
    return -2.0 * val


def kernel_semigroup(f: ChebSeries, t: float, x, degree: int = 64, n_nodes: int = 400):
    """``int k_t(x, y) f(y) beta(dy)`` with the kernel summed to ``degree``."""
    rule = beta_rule(n_nodes)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = np.arange(1, degree + 1)
    ty = np.arccos(rule.nodes / 2.0)
    tx = np.arccos(x / 2.0)
    k = 1.0 + 2.0 * (np.cos(np.outer(tx, n)) * np.exp(-t * n)) @ np.cos(np.outer(n, ty))
    return k @ (rule.weights * f(rule.nodes))


def double_log_energy(psi, n_outer: int = 200) -> float:
    """``-iint log|x - y| psi(x) psi(y) beta(dx) beta(dy)`` by nested quadrature."""
    t, w = np.polynomial.legendre.leggauss(n_outer)
    u = 0.5 * np.pi * (t + 1.0)
    w = 0.5 * np.pi * w
    inner = np.array([log_potential(psi, 2.0 * np.cos(ui)) for ui in u])
    return float(np.sum(w * inner * psi(2.0 * np.cos(u))) / np.pi)


def fourier_entropy(gamma, t_max: float = 200.0, panel: float = 0.5, order: int = 24) -> float:
    """``int_0^inf |mu^(t) - nu^(t)|^2 / t dt`` for ``mu - nu = sum gamma_n phi_n d beta``.

    Uses ``int e^{itx} phi_n(x) beta(dx) = i^n J_n(2t)`` on ``(0, t_max]`` plus
    the averaged large-``t`` tail of the Bessel asymptotics.
    """
    g = np.asarray(gamma, dtype=float)
    n = np.arange(g.size)
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.arange(0.0, t_max + panel / 2, panel)
    a, b = edges[:-1], edges[1:]
    t = (0.5 * (b - a)[:, None] * (x[None, :] + 1.0) + a[:, None]).ravel()
    wt = (0.5 * (b - a)[:, None] * w[None, :]).ravel()
    J = special.jv(n[None, :], 2.0 * t[:, None])
    phase = 1j ** n
    amp = J @ (g * phase)
    body = np.sum(wt * np.abs(amp) ** 2 / t)
    plus, minus = g.sum(), np.sum(g * (-1.0) ** n)
    tail = (plus ** 2 + minus ** 2) / (4.0 * np.pi * t_max)
    return float(body + tail)


def abs_integral_beta(f, n_panels: int = 200, order: int = 20) -> float:
    """``int |f| d beta`` by composite Gauss-Legendre in ``theta``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, np.pi, n_panels + 1)
    a, b = edges[:-1], edges[1:]
    u = (0.5 * (b - a)[:, None] * (x[None, :] + 1.0) + a[:, None]).ravel()
    wu = (0.5 * (b - a)[:, None] * w[None, :]).ravel()
    return float(np.sum(wu * np.abs(f(2.0 * np.cos(u)))) / np.pi)


def semicircle_log_potential(x: float) -> float:
    """``int log|x - y| alpha(dy)`` by adaptive quadrature."""
    def g(y):
        return np.log(abs(x - y)) * np.sqrt(4.0 - y * y) / (2.0 * np.pi)

    pts = [x] if -2.0 < x < 2.0 else None
    return integrate.quad(g, -2.0, 2.0, points=pts, limit=400, epsabs=1e-13)[0]
