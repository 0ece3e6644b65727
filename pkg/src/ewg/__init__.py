"""Exponentiated Weibull-geometric (EWG) lifetime distribution.

Evaluation, sampling, moments, entropies, order statistics, residual life,
sub-models and maximum-likelihood fitting.
"""

__version__ = "0.1.0"

from .distribution import (EwgParams, SampleSpec, cdf, hazard, hazard_shape, logpdf, median,
                           mixture_pdf, pdf, quantile, sample, survival)
from .entropy import EntropyResult, renyi_entropy, shannon_entropy
from .errors import (ConditioningError, ConsistencyError, DivergenceError, DomainError,
                     EWGError, QuadratureError, TruncationError)
from .estimation import (DataSample, FitResult, confidence_intervals, fit_mle, log_likelihood,
                         observed_information, score)
from .kernels import BACKEND
from .moments import (MomentResult, mean, mgf, raw_moment, raw_moment_quadrature,
                      raw_moment_series, variance)
from .order_stats import (OrderStatSpec, order_stat_cdf, order_stat_moment, order_stat_pdf)
from .residual import ResidualSpec, mean_residual_life, residual_moment, residual_variance
from .special import (SeriesControl, generalized_binomial, ln_gamma, lower_incomplete_gamma,
                      upper_incomplete_gamma)
from .submodels import (SubmodelKind, free_parameters, make_submodel, submodel_mean,
                        submodel_variance)

__all__ = [
    "BACKEND", "ConditioningError", "ConsistencyError", "DataSample", "DivergenceError",
    "DomainError", "EWGError", "EntropyResult", "EwgParams", "FitResult", "MomentResult",
    "OrderStatSpec", "QuadratureError", "ResidualSpec", "SampleSpec", "SeriesControl",
    "SubmodelKind", "TruncationError", "cdf", "confidence_intervals", "fit_mle",
    "free_parameters", "generalized_binomial", "hazard", "hazard_shape", "ln_gamma",
    "log_likelihood", "logpdf", "lower_incomplete_gamma", "make_submodel", "mean",
    "mean_residual_life", "median", "mgf", "mixture_pdf", "observed_information",
    "order_stat_cdf", "order_stat_moment", "order_stat_pdf", "pdf", "quantile", "raw_moment",
    "raw_moment_quadrature", "raw_moment_series", "renyi_entropy", "residual_moment",
    "residual_variance", "sample", "score", "shannon_entropy", "submodel_mean",
    "submodel_variance", "survival", "upper_incomplete_gamma", "variance",
]
