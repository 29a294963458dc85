"""Finite-blocklength performance of rank-deficient product MIMO channels.

Closed-form asymptotic moments of the per-antenna information density,
packet-error-probability bounds built from them, and a deterministic
Monte Carlo oracle that validates every closed form.
"""

from .asymptotics import (
    AsymptoticMoments,
    RayleighMoments,
    asymptotic_moments,
    bound_variances,
    equal_antenna_bounds,
    ergodic_mi,
    high_snr_variances,
    low_snr_variances,
    rayleigh_moments,
    variance_vn,
    xi,
)
from .bounds import (
    ErrorBounds,
    bound_gap,
    error_prob_bounds,
    normal_cdf,
    outage_probability,
    second_order_rate,
)
from .errors import (
    ConfigError,
    DegenerateDenominator,
    EdgeCaseUnsupported,
    FactorizationFailure,
    FblRmtError,
    InvalidVariance,
    MultipleAdmissibleRoots,
    NoAdmissibleRoot,
    NoCaseApplies,
    NonPositiveLogArgument,
    NonPositiveVariance,
    SelfCheckFailed,
    XiOutOfRange,
)
from .fixed_point import (
    FixedPoint,
    RayleighFixedPoint,
    fixed_point,
    rayleigh_fixed_point,
    scaled_cubic_residual,
    solve_omega,
)
from .montecarlo import (
    ChannelKind,
    McScenario,
    McSummary,
    ResolventEstimate,
    TrialStreams,
    dump_samples,
    ks_vs_normal,
    mi_sample,
    mid_sample,
    resolvent_checks,
    run_monte_carlo,
    sample_channel,
    sphere_codebook,
    trace_a_sq,
)
from .params import (
    ChannelDims,
    NoiseLevel,
    Ratios,
    dims_from_ratios,
    ratios_from_dims,
    sigma2_from_snr_db,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticMoments",
    "ChannelDims",
    "ChannelKind",
    "ConfigError",
    "DegenerateDenominator",
    "EdgeCaseUnsupported",
    "ErrorBounds",
    "FactorizationFailure",
    "FblRmtError",
    "FixedPoint",
    "InvalidVariance",
    "McScenario",
    "McSummary",
    "MultipleAdmissibleRoots",
    "NoAdmissibleRoot",
    "NoCaseApplies",
    "NoiseLevel",
    "NonPositiveLogArgument",
    "NonPositiveVariance",
    "Ratios",
    "RayleighFixedPoint",
    "RayleighMoments",
    "ResolventEstimate",
    "SelfCheckFailed",
    "TrialStreams",
    "XiOutOfRange",
    "asymptotic_moments",
    "bound_gap",
    "bound_variances",
    "dims_from_ratios",
    "dump_samples",
    "equal_antenna_bounds",
    "ergodic_mi",
    "error_prob_bounds",
    "fixed_point",
    "high_snr_variances",
    "ks_vs_normal",
    "low_snr_variances",
    "mi_sample",
    "mid_sample",
    "normal_cdf",
    "outage_probability",
    "ratios_from_dims",
    "rayleigh_fixed_point",
    "rayleigh_moments",
    "resolvent_checks",
    "run_monte_carlo",
    "sample_channel",
    "scaled_cubic_residual",
    "second_order_rate",
    "sigma2_from_snr_db",
    "solve_omega",
    "sphere_codebook",
    "trace_a_sq",
    "variance_vn",
    "xi",
]
