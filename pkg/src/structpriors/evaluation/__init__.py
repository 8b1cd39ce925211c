"""The four prior-quality tests: predictive entropy, activation
correlations, CAPPA, and training curves (with the structure ablation)."""

from .cappa import cappa
from .common import batched_logits, map_indexed, standard_error
from .correlation import PairSet, activation_correlations, pearson, sample_pairs
from .entropy import histogram_entropy, predictive_histogram, prior_predictive_entropy
from .reports import (
    CappaReport,
    CorrelationReport,
    EntropyReport,
    TrainingCurve,
    aggregate_curves,
    config_fingerprint,
    strip_timing,
    write_csv,
    write_json_report,
)
from .training import (
    ABLATION_VARIANTS,
    TrainHyperparams,
    ablation_grid,
    accuracy,
    train_experiment,
    train_run,
)

__all__ = [
    "cappa",
    "batched_logits",
    "map_indexed",
    "standard_error",
    "PairSet",
    "activation_correlations",
    "pearson",
    "sample_pairs",
    "histogram_entropy",
    "predictive_histogram",
    "prior_predictive_entropy",
    "CappaReport",
    "CorrelationReport",
    "EntropyReport",
    "TrainingCurve",
    "aggregate_curves",
    "config_fingerprint",
    "strip_timing",
    "write_csv",
    "write_json_report",
    "ABLATION_VARIANTS",
    "TrainHyperparams",
    "ablation_grid",
    "accuracy",
    "train_experiment",
    "train_run",
]
