"""Millimeter-wave large-scale path loss models: evaluation, fitting, synthesis."""

from .analysis import ComparisonReport, RangeQuery, compare_models, max_range
from .dataset import Dataset, GenSpec, PathLossSample, dump_csv, generate_synthetic, load_csv, where
from .dataset import filter as filter_dataset
from .estimation import (
    FitResult,
    fit_abg,
    fit_ci,
    fit_cif,
    fit_fi,
    fit_model,
    grid_oracle_fit,
    residual_stats,
)
from .models import (
    INDOOR_OFFICE,
    UMI_SC,
    AbgParams,
    CifParams,
    CiParams,
    Environment,
    FiParams,
    Scenario,
    compute_f0,
    eval_abg,
    eval_ci,
    eval_cif,
    eval_fi,
    fspl_1m,
)
from .plot import emit_plot
from .registry import reference_lookup

__version__ = "0.1.0"
