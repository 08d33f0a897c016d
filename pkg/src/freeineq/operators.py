"""Diagonal and shift operators on Chebyshev coefficients.

In the basis ``phi_n`` the logarithmic potential ``E`` acts as ``1/n``, the
number operator ``N`` as ``n`` and ``L = N^2``. ``U`` (the derivative of
``E``) and the Hilbert transform send ``phi_n`` to multiples of ``psi_{n-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .chebyshev import ChebSeries, SecondKindSeries
from .measures import BetaDensity, ScaledMeasure, SignedDifference


class OperatorKind(Enum):
    E = "E"
    N = "N"
    L = "L"
    U = "U"
    SEMIGROUP = "semigroup"


@dataclass(frozen=True)
class OperatorTag:
    kind: OperatorKind
    t: float = 0.0

    def __post_init__(self):
        if self.kind is OperatorKind.SEMIGROUP and not self.t >= 0:
            raise ValueError("semigroup time must be nonnegative")

    def __call__(self, f: ChebSeries):
        return {
            OperatorKind.E: apply_E,
            OperatorKind.N: apply_N,
            OperatorKind.L: apply_L,
            OperatorKind.U: apply_U,
        }.get(self.kind, lambda g: semigroup(g, self.t))(f)


def _n(f: ChebSeries) -> np.ndarray:
    return np.arange(f.coeffs.size, dtype=float)


def apply_E(f: ChebSeries) -> ChebSeries:
    n = _n(f)
    out = np.zeros_like(f.coeffs)
    out[1:] = f.coeffs[1:] / n[1:]
    return ChebSeries(out)


def apply_N(f: ChebSeries) -> ChebSeries:
    return ChebSeries(_n(f) * f.coeffs)


def apply_L(f: ChebSeries) -> ChebSeries:
    return ChebSeries(_n(f) ** 2 * f.coeffs)


def apply_U(f: ChebSeries) -> SecondKindSeries:
    """``U phi_n = psi_{n-1} / 2``; constants are annihilated."""
    if f.coeffs.size == 1:
        return SecondKindSeries([0.0])
    return SecondKindSeries(0.5 * f.coeffs[1:])


def _density_coeffs(mu) -> np.ndarray:
    if isinstance(mu, SignedDifference):
        return mu.gamma
    if isinstance(mu, BetaDensity):
        return mu.coeffs
    if isinstance(mu, ChebSeries):
        return mu.coeffs
    raise TypeError(f"no arcsine density for {type(mu).__name__}")


def hilbert(mu) -> SecondKindSeries:
    """Hilbert transform ``p.v. int 2 / (x - y) mu(dy)`` of ``f d beta``.

    Sign fixed by the principal-value integral itself:
    ``H(phi_n d beta) = -psi_{n-1}``, so ``H(f d beta) = -2 U f``.
    """
    g = _density_coeffs(mu)
    if g.size == 1:
        return SecondKindSeries([0.0])
    return SecondKindSeries(-g[1:])


def hilbert_at(mu, x):
    """Pointwise Hilbert transform, also for rescaled and translated measures."""
    if isinstance(mu, ScaledMeasure):
        return hilbert(mu.base)(mu.to_base(x)) / mu.half_width
    return hilbert(mu)(x)


def semigroup(f: ChebSeries, t: float) -> ChebSeries:
    """``P_t = exp(-t N)``: damps ``phi_n`` by ``exp(-t n)``."""
    if t < 0:
        raise ValueError("semigroup time must be nonnegative")
    return ChebSeries(np.exp(-t * _n(f)) * f.coeffs)
