"""Chebyshev bases on [-2, 2] and Gauss rules for the arcsine and semicircle laws.

Functions on [-2, 2] are expanded in ``phi_n(x) = T_n(x/2)`` (orthogonal for the
arcsine law ``beta(dx) = dx / (pi sqrt(4 - x^2))``) or in ``psi_n(x) = U_n(x/2)``
(orthonormal for the semicircle law ``alpha(dx) = sqrt(4 - x^2) dx / (2 pi)``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from numpy.polynomial import chebyshev as npcheb


def _as_coeffs(coeffs) -> np.ndarray:
    c = np.array(coeffs, dtype=float).ravel()
    if c.size == 0:
        c = np.zeros(1)
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    c.setflags(write=False)
    return c


def _check_closed(x, inclusive=True):
    x = np.asarray(x, dtype=float)
    bad = np.abs(x) > 2 if inclusive else np.abs(x) >= 2
    if np.any(bad):
        raise ValueError("argument outside the interval [-2, 2]")
    return x


@dataclass(frozen=True)
class ChebSeries:
    """Finite expansion ``sum_n coeffs[n] * phi_n(x)`` on [-2, 2]."""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @classmethod
    def basis(cls, n: int, scale: float = 1.0) -> "ChebSeries":
        c = np.zeros(n + 1)
        c[n] = scale
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        x = _check_closed(x)
        return npcheb.chebval(x / 2.0, self.coeffs)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self.coeffs.size))
        out[: self.coeffs.size] = self.coeffs
        return out

    def __add__(self, other: "ChebSeries") -> "ChebSeries":
        n = max(self.coeffs.size, other.coeffs.size)
        return ChebSeries(self.padded(n) + other.padded(n))

    def __sub__(self, other: "ChebSeries") -> "ChebSeries":
        n = max(self.coeffs.size, other.coeffs.size)
        return ChebSeries(self.padded(n) - other.padded(n))

    def __mul__(self, scalar: float) -> "ChebSeries":
        return ChebSeries(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ChebSeries":
        return ChebSeries(-self.coeffs)

    def derivative(self) -> "SecondKindSeries":
        """``phi_n' = (n/2) psi_{n-1}``."""
        n = np.arange(1, self.coeffs.size)
        return SecondKindSeries(0.5 * n * self.coeffs[1:])


@dataclass(frozen=True)
class SecondKindSeries:
    """Finite expansion ``sum_n coeffs[n] * psi_n(x)`` on [-2, 2]."""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        u = _check_closed(x) / 2.0
        # Clenshaw recurrence for U_n: b_k = c_k + 2u b_{k+1} - b_{k+2}, value b_0
        b1 = np.zeros_like(u)
        b2 = np.zeros_like(u)
        for c in self.coeffs[::-1]:
            b1, b2 = c + 2.0 * u * b1 - b2, b1
        return b1

    def __sub__(self, other: "SecondKindSeries") -> "SecondKindSeries":
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return SecondKindSeries(a - b)

    def to_first_kind(self) -> np.ndarray:
        """Coefficients of the same polynomial in the ``T_n(x/2)`` basis."""
        # U_n = 2 (T_n + T_{n-2} + ...) minus T_0 when n is even
        m = self.coeffs.size
        t = np.zeros(m)
        for n, c in enumerate(self.coeffs):
            if c == 0.0:
                continue
            t[n % 2 : n + 1 : 2] += 2.0 * c
            if n % 2 == 0:
                t[0] -= c
        return t

    def real_roots(self) -> np.ndarray:
        """Sorted roots inside (-2, 2)."""
        t = np.trim_zeros(self.to_first_kind(), "b")
        if t.size <= 1:
            return np.empty(0)
        r = npcheb.chebroots(t)
        r = r[np.abs(r.imag) < 1e-10].real
        r = r[np.abs(r) < 1.0]
        return np.sort(2.0 * r)


def eval_phi(n: int, x):
    """``T_n(x/2)``; raises ``ValueError`` for ``|x| > 2``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = _check_closed(x)
    return np.cos(n * np.arccos(np.clip(x / 2.0, -1.0, 1.0)))


def eval_psi(n: int, x, endpoints: bool = False):
    """``U_n(x/2)`` on the open interval.

    With ``endpoints=True`` the limits ``U_n(+-1) = (+-1)^n (n + 1)`` are
    returned at ``x = +-2`` instead of raising.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = _check_closed(x, inclusive=endpoints)
    theta = np.arccos(np.clip(x / 2.0, -1.0, 1.0))
    s = np.sin(theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sin((n + 1) * theta) / s
    at_end = np.abs(x) == 2.0
    if np.any(at_end):
        val = np.where(at_end, np.sign(x) ** n * (n + 1), val)
    return val[()] if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class QuadratureRule:
    weight_kind: Literal["alpha", "beta"]
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def apply(self, f: Callable) -> float:
        return self.integrate(f(self.nodes))


def beta_rule(k: int) -> QuadratureRule:
    """Gauss rule for the arcsine law: exact for degree <= 2k - 1."""
    j = np.arange(1, k + 1)
    nodes = 2.0 * np.cos(np.pi * (2 * j - 1) / (2 * k))
    return QuadratureRule("beta", nodes, np.full(k, 1.0 / k))


def alpha_rule(k: int) -> QuadratureRule:
    """Gauss rule for the semicircle law: exact for degree <= 2k - 1."""
    j = np.arange(1, k + 1)
    ang = j * np.pi / (k + 1)
    return QuadratureRule("alpha", 2.0 * np.cos(ang), 2.0 / (k + 1) * np.sin(ang) ** 2)


def default_nodes(degree: int) -> int:
    """Node count making every quadratic functional of a degree-N series exact."""
    return 4 * (degree + 1)


def beta_integral(f, rule: QuadratureRule | None = None) -> float:
    """Integral against the arcsine law.

    A :class:`ChebSeries` integrates to its constant coefficient. Arrays are
    taken as values at the nodes of ``rule`` (or of ``beta_rule(len(f))``).
    Callables are sampled on ``rule``.
    """
    if isinstance(f, ChebSeries):
        return float(f.coeffs[0])
    if callable(f):
        if rule is None:
            raise ValueError("a quadrature rule is needed for callables")
        return rule.apply(f)
    values = np.asarray(f, dtype=float)
    rule = rule or beta_rule(values.size)
    if rule.weight_kind != "beta" or len(rule) != values.size:
        raise ValueError("values do not match the arcsine rule")
    return rule.integrate(values)


def alpha_integral(f, rule: QuadratureRule | None = None) -> float:
    """Integral against the semicircle law, exact on polynomials up to the rule order."""
    if isinstance(f, SecondKindSeries):
        return float(f.coeffs[0])
    if isinstance(f, ChebSeries):
        rule = rule or alpha_rule(f.degree + 1)
        return rule.apply(f)
    if callable(f):
        rule = rule or alpha_rule(200)
        return rule.apply(f)
    values = np.asarray(f, dtype=float)
    rule = rule or alpha_rule(values.size)
    if rule.weight_kind != "alpha" or len(rule) != values.size:
        raise ValueError("values do not match the semicircle rule")
    return rule.integrate(values)


def _phi_matrix(degree: int, nodes: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.clip(nodes / 2.0, -1.0, 1.0))
    return np.cos(np.outer(np.arange(degree + 1), theta))


def project(values, degree: int | None = None, rule: QuadratureRule | None = None) -> ChebSeries:
    """Coefficients from samples at the arcsine nodes.

    ``gamma_n = c_n * int f phi_n d beta`` with ``c_0 = 1`` and ``c_n = 2``.
    """
    values = np.asarray(values, dtype=float).ravel()
    rule = rule or beta_rule(values.size)
    if rule.weight_kind != "beta" or len(rule) != values.size:
        raise ValueError(f"expected {len(rule)} values at the arcsine nodes, got {values.size}")
    if degree is None:
        degree = values.size - 1
    if degree > values.size - 1:
        raise ValueError("degree exceeds what the rule resolves")
    gram = _phi_matrix(degree, rule.nodes) @ (rule.weights * values)
    gram[1:] *= 2.0
    return ChebSeries(gram)


def interpolate(f: Callable, degree: int) -> ChebSeries:
    """Project a callable onto degree ``degree`` using ``4(degree+1)`` nodes."""
    rule = beta_rule(default_nodes(degree))
    return project(f(rule.nodes), degree=degree, rule=rule)


def _theta_segments(roots_x: np.ndarray) -> np.ndarray:
    inner = np.sort(np.arccos(np.clip(np.asarray(roots_x) / 2.0, -1.0, 1.0)))
    return np.unique(np.concatenate([[0.0], inner, [np.pi]]))


def _gauss_on_segments(edges: np.ndarray, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    u = (half[:, None] * (x[None, :] + 1.0) + a[:, None]).ravel()
    wu = (half[:, None] * w[None, :]).ravel()
    return u, wu


def alpha_abs_moment(q: SecondKindSeries, p: float, order: int = 64) -> float:
    """``int |q|^p d alpha``, split at the sign changes of ``q``."""
    u, wu = _gauss_on_segments(_theta_segments(q.real_roots()), order)
    vals = np.abs(q(2.0 * np.cos(u))) ** p
    return float(2.0 / np.pi * np.sum(wu * vals * np.sin(u) ** 2))


def beta_abs_moment(f: ChebSeries, p: float = 1.0, order: int = 64) -> float:
    """``int |f|^p d beta``, split at the sign changes of ``f``."""
    c = np.trim_zeros(f.coeffs, "b")
    if c.size <= 1:
        return float(abs(c[0]) ** p) if c.size else 0.0
    r = npcheb.chebroots(c)
    r = 2.0 * r[(np.abs(r.imag) < 1e-10) & (np.abs(r.real) < 1.0)].real
    u, wu = _gauss_on_segments(_theta_segments(r), order)
    return float(np.sum(wu * np.abs(f(2.0 * np.cos(u))) ** p) / np.pi)
