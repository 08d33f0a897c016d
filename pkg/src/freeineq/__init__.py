"""Free-probability functionals and functional inequalities on compact intervals."""

from .chebyshev import ChebSeries, QuadratureRule, SecondKindSeries, alpha_rule, beta_rule
from .equilibrium import (
    CompressionMap, EquilibriumResult, Potential, compression_map, double_well_demo,
    euler_lagrange_residual, global_transport_check, solve_equilibrium,
)
from .functionals import (
    FunctionalValue, entropy_H, fisher_I, fisher_J, log_energy, lp_information,
    relative_entropy_EV, total_variation,
)
from .measures import BetaDensity, GridMeasure, ScaledMeasure, SignedDifference, rescale
from .operators import apply_E, apply_L, apply_N, apply_U, hilbert, semigroup
from .transport import monotone_map, w1_dual_spectral, wasserstein_p

__all__ = [
    "BetaDensity", "ChebSeries", "CompressionMap", "EquilibriumResult", "FunctionalValue",
    "GridMeasure", "Potential", "QuadratureRule", "ScaledMeasure", "SecondKindSeries",
    "SignedDifference", "alpha_rule", "apply_E", "apply_L", "apply_N", "apply_U", "beta_rule",
    "compression_map", "double_well_demo", "entropy_H", "euler_lagrange_residual", "fisher_I",
    "fisher_J", "global_transport_check", "hilbert", "log_energy", "lp_information",
    "monotone_map", "relative_entropy_EV", "rescale", "semigroup", "solve_equilibrium",
    "total_variation", "w1_dual_spectral", "wasserstein_p",
]
