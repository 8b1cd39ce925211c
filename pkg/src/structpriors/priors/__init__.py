"""Weight priors: i.i.d. baseline, structured Gabor first layers, and
feature-specific final layers, with whole-layer moment matching."""

from .export import export_filter_bank, read_params_log, write_pgm, write_ppm
from .feature import feature_prior_means, sample_final_layer
from .gabor import (
    GaborBank,
    GaborParams,
    add_filter_noise,
    colorize,
    eval_gabor,
    sample_gabor_bank,
    sample_gabor_params,
)
from .init import (
    DEFAULT_EXEMPLARS_PER_CLASS,
    DEFAULT_FEATURE_STD,
    FeatureSpecific,
    Gabor,
    IID,
    PriorSpec,
    first_conv_index,
    init_network,
    make_prior_spec,
    validate_prior,
)
from .layers import sample_iid_layer, standardize_layer

__all__ = [
    "export_filter_bank",
    "read_params_log",
    "write_pgm",
    "write_ppm",
    "feature_prior_means",
    "sample_final_layer",
    "GaborBank",
    "GaborParams",
    "add_filter_noise",
    "colorize",
    "eval_gabor",
    "sample_gabor_bank",
    "sample_gabor_params",
    "DEFAULT_EXEMPLARS_PER_CLASS",
    "DEFAULT_FEATURE_STD",
    "FeatureSpecific",
    "Gabor",
    "IID",
    "PriorSpec",
    "first_conv_index",
    "init_network",
    "make_prior_spec",
    "validate_prior",
    "sample_iid_layer",
    "standardize_layer",
]
