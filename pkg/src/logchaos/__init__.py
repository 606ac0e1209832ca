"""Numerical laboratory for Gaussian multiplicative chaos with a
strictly logarithmic covariance kernel ln(T/|x - y|) on balls:
positive-definiteness thresholds, mass simulation from exact
cell-averaged covariances, Laplace-transform factorizations through
backward-heat factors, and lognormal small-deviation exponent bounds.
"""

from .bounds import (
    BoundsReport,
    bounds_report,
    exponent_sandwich,
    transfer_to_unit,
    unit_exponent_lower,
    unit_exponent_upper,
)
from .config import RunConfig, load_config, parse_config
from .errors import (
    DegenerateCaseError,
    FactorizationError,
    NumericalError,
    ParameterError,
    QuadratureError,
)
from .field import CovarianceFactor, Grid, build_grid, covariance_factor, sample_field
from .gmc import (
    GmcConstants,
    SampleBank,
    create_bank,
    gmc_mass,
    load_bank,
    sample_scaled_masses,
    save_bank,
    scaling_constants,
)
from .laplace import (
    DegenerateLaw,
    HeatFactorPoint,
    LaplaceEstimate,
    LognormalLaw,
    envelope_constant,
    estimate_Q,
    exponential_mixture_estimate,
    heat_drift_gap,
    heat_factor_exact,
    heat_factor_mc,
    heat_residual,
    inverse_heat_factor_exact,
    inverse_heat_factor_mc,
    laplace_band_coefficients,
    laplace_curve,
    laplace_lower_envelope,
    transfer_check,
)
from .params import ModelParams
from .potential import (
    PdReport,
    boundary_threshold,
    cap_area,
    log_potential_ball,
    mean_split_exponent,
    mean_weight_profile,
    pd_min_eigenvalue,
    pd_threshold,
    spatial_mean_variance,
    uniform_energy_threshold,
)
from .smalldev import (
    ExponentFit,
    SmallDevCurve,
    exact_curve,
    fit_laplace_exponent,
    fit_lognormal_exponent,
    laplace_vs_smalldev,
    smalldev_curve,
    smalldev_prob,
)
from .verify import run_acceptance

__version__ = "0.1.0"

__all__ = [
    "BoundsReport",
    "CovarianceFactor",
    "DegenerateCaseError",
    "DegenerateLaw",
    "ExponentFit",
    "FactorizationError",
    "GmcConstants",
    "Grid",
    "HeatFactorPoint",
    "LaplaceEstimate",
    "LognormalLaw",
    "ModelParams",
    "NumericalError",
    "ParameterError",
    "PdReport",
    "QuadratureError",
    "RunConfig",
    "SampleBank",
    "SmallDevCurve",
    "bounds_report",
    "boundary_threshold",
    "build_grid",
    "cap_area",
    "covariance_factor",
    "create_bank",
    "envelope_constant",
    "estimate_Q",
    "exact_curve",
    "exponent_sandwich",
    "exponential_mixture_estimate",
    "fit_laplace_exponent",
    "fit_lognormal_exponent",
    "gmc_mass",
    "heat_drift_gap",
    "heat_factor_exact",
    "heat_factor_mc",
    "heat_residual",
    "inverse_heat_factor_exact",
    "inverse_heat_factor_mc",
    "laplace_band_coefficients",
    "laplace_curve",
    "laplace_lower_envelope",
    "laplace_vs_smalldev",
    "load_bank",
    "load_config",
    "log_potential_ball",
    "mean_split_exponent",
    "mean_weight_profile",
    "parse_config",
    "pd_min_eigenvalue",
    "pd_threshold",
    "run_acceptance",
    "sample_field",
    "sample_scaled_masses",
    "save_bank",
    "scaling_constants",
    "smalldev_curve",
    "smalldev_prob",
    "spatial_mean_variance",
    "transfer_check",
    "transfer_to_unit",
    "uniform_energy_threshold",
    "unit_exponent_lower",
    "unit_exponent_upper",
]
