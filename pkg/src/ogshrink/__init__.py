"""Group-sparse denoising by overlapping group shrinkage."""

from .audio import read_wav, write_wav
from .benchmark import (
    SnrReport,
    benchmark_example1,
    mean_method_snr,
    reports_from_json,
    reports_to_json,
)
from .calibration import (
    CalibrationEntry,
    CalibrationTable,
    build_table,
    estimate_alpha,
    solve_lambda_for_alpha,
)
from .ogs import (
    InternalInvariantError,
    OgsConfig,
    OgsResult,
    majorizer_q,
    ogs_cost,
    ogs_denoise,
    ogs_denoise_2d,
    optimality_check,
)
from .penalties import (
    PENALTY_KINDS,
    PenaltySpec,
    curvature_at_zero,
    is_strictly_convex,
    max_convex_a,
    penalty_deriv,
    penalty_second_deriv,
    penalty_value,
    penalty_weight,
    within_convex_bound,
)
from .shrinkage import (
    ThresholdProblem,
    group_threshold,
    scalar_threshold,
    slope_at_threshold,
)
from .signals import (
    add_awgn,
    attenuation_threshold,
    empirical_wiener_post,
    estimate_sigma_mad,
    gen_group_sparse,
    hard_threshold_attenuation,
    scalar_threshold_denoise,
    snr_db,
    soft_threshold_attenuation,
)
from .spectral import (
    Spectrogram,
    SpectrogramPlan,
    denoise_speech,
    istft,
    stft,
    stft_noise_std,
)
from .sure import SureEstimate, config_for_lambda, mc_sure, sure_scan

__all__ = [
    "CalibrationEntry",
    "CalibrationTable",
    "InternalInvariantError",
    "OgsConfig",
    "OgsResult",
    "PENALTY_KINDS",
    "PenaltySpec",
    "SnrReport",
    "Spectrogram",
    "SpectrogramPlan",
    "SureEstimate",
    "ThresholdProblem",
    "add_awgn",
    "attenuation_threshold",
    "benchmark_example1",
    "build_table",
    "config_for_lambda",
    "curvature_at_zero",
    "denoise_speech",
    "empirical_wiener_post",
    "estimate_alpha",
    "estimate_sigma_mad",
    "gen_group_sparse",
    "group_threshold",
    "hard_threshold_attenuation",
    "is_strictly_convex",
    "istft",
    "majorizer_q",
    "max_convex_a",
    "mc_sure",
    "mean_method_snr",
    "ogs_cost",
    "ogs_denoise",
    "ogs_denoise_2d",
    "optimality_check",
    "penalty_deriv",
    "penalty_second_deriv",
    "penalty_value",
    "penalty_weight",
    "read_wav",
    "reports_from_json",
    "reports_to_json",
    "scalar_threshold",
    "scalar_threshold_denoise",
    "slope_at_threshold",
    "snr_db",
    "soft_threshold_attenuation",
    "solve_lambda_for_alpha",
    "stft",
    "stft_noise_std",
    "sure_scan",
    "within_convex_bound",
    "write_wav",
]

__version__ = "0.1.0"
