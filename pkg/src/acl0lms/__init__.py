"""Adaptive sparse system identification with affine combinations of LMS
and L0-LMS filters, plus a seeded Monte-Carlo learning-curve harness."""

__version__ = "0.1.0"

from .adaptive_filters import (
    FilterState,
    SparsityParams,
    filter_error,
    l0_penalty_gradient_exact,
    l0lms_step,
    lms_step,
    predict,
    zero_attract,
)
from .affine_combiner import (
    CombinedFilter,
    CombinerState,
    combined_error,
    combined_iteration,
    combined_output,
    combiner_step,
    difference_filter,
    equivalent_weights,
    optimal_lambda,
)
from .config import ExperimentConfig, derive_step_sizes, load_config
from .errors import ConfigError, DegenerateCombinerError, DimensionError, DivergenceError
from .experiment import RunResult, run_scenario, run_single, sweep_delta
from .metrics import LearningCurve, SteadyStateEstimate, monte_carlo_average, msd, steady_state, to_db
from .signal_model import (
    NoiseSpec,
    RegressorWindow,
    SparseFir,
    generate_sparse_fir,
    noise_variance_from_snr,
    push_sample,
    system_output,
)
