"""Triggered urn models with a growing color set.

The package covers four angles on the same process: forward simulation
(`urn_core`), exact laws for the constant-trigger linear case
(`exact_simon`), Poisson and normal approximations to the color count
(`approx`), and regression-based parameter recovery from trajectories
(`analysis`). `ingest` turns timestamped event logs into the same
history format the simulator emits, so both feed one analysis path.
"""

from .analysis import (
    DominanceReport,
    FitReport,
    FrequencySpectrum,
    HeapsZipf,
    ParameterEstimates,
    PooledEstimates,
    RankCurve,
    RegimeReport,
    ScenarioPrediction,
    TrajectoryBundle,
    bundle_from_trace,
    dominance_diagnostic,
    estimate_parameters,
    frequency_spectrum,
    heaps_zipf_check,
    loglog_fit,
    pool_estimates,
    rank_curve,
    regime_classifier,
    theoretical_prediction,
)
from .approx import (
    ApproxReport,
    CltReport,
    TVDistance,
    barbour_holst,
    clt_report,
    poisson_binomial_pmf,
    total_variation,
)
from .distributions import ExactDistribution, PoissonLaw
from .errors import EstimationError, OracleMismatch, UrnkitError, ValidationError
from .exact_simon import (
    Color1Expectation,
    SeriesValue,
    asymptotic_prefactor,
    colors_moments,
    colors_pmf,
    dynamic_mean_color1,
    expected_count,
    expected_count_color1,
    lambda_series,
    prob_color_absent,
)
from .ingest import (
    EventStream,
    HistoryMapping,
    empirical_trajectories,
    load_events,
    to_history,
)
from .urn_core import (
    Constant,
    Enumeration,
    Explicit,
    Geometric,
    Harmonic,
    Linear,
    NewColor,
    PowerLaw,
    PowerRoot,
    Repeat,
    SimulationConfig,
    Tabulated,
    Trace,
    UrnState,
    checkpoint_times,
    enumerate_exact,
    path_probability,
    replicate,
    schedule_from_config,
    simulate,
    step,
    update_from_config,
    validate_history,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "UrnkitError", "ValidationError", "EstimationError", "OracleMismatch",
    # distributions
    "ExactDistribution", "PoissonLaw",
    # model building blocks
    "Linear", "PowerRoot", "Tabulated", "update_from_config",
    "Constant", "PowerLaw", "Harmonic", "Geometric", "Explicit",
    "schedule_from_config",
    # engine
    "UrnState", "NewColor", "Repeat", "step", "checkpoint_times",
    "SimulationConfig", "Trace", "simulate", "replicate",
    "validate_history", "path_probability", "Enumeration", "enumerate_exact",
    # exact laws
    "colors_pmf", "colors_moments", "prob_color_absent",
    "SeriesValue", "lambda_series", "expected_count",
    "Color1Expectation", "expected_count_color1",
    "asymptotic_prefactor", "dynamic_mean_color1",
    # approximations
    "poisson_binomial_pmf", "ApproxReport", "barbour_holst",
    "TVDistance", "total_variation", "CltReport", "clt_report",
    # analysis
    "FrequencySpectrum", "frequency_spectrum", "RankCurve", "rank_curve",
    "FitReport", "loglog_fit", "TrajectoryBundle", "bundle_from_trace",
    "ParameterEstimates", "estimate_parameters",
    "PooledEstimates", "pool_estimates",
    "ScenarioPrediction", "theoretical_prediction",
    "RegimeReport", "regime_classifier",
    "DominanceReport", "dominance_diagnostic",
    "HeapsZipf", "heaps_zipf_check",
    # ingest
    "EventStream", "load_events", "HistoryMapping", "to_history",
    "empirical_trajectories",
]
