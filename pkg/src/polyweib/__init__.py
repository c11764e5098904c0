"""Closed-form quantile models: polynomials over a Weibull basis.

A model represents x = a0 + a1 z + ... + an z^n where z is the quantile
of a Weibull(lambda, k) base distribution.  Models are fitted either to
a known quantile function (percentile matching) or to raw observations
(probability-weighted moment matching), audited on a dense grid, and
evaluated for quantiles, densities and random variates.
"""

from .errors import (ConditioningError, DomainError, InfiniteDerivativeError,
                     InputError, InsufficientDataError, IntegrityError,
                     NonMonotoneError, NumericalError, OutOfRangeWarning,
                     PolyweibError, SingularityError,
                     UnsupportedOperationError)
from .model import (DEFAULT_RANGE, MonotonicityReport,
                    PolynomialQuantileModel, cdf_at, check_monotone,
                    derivative_array, model_from_dict, model_from_json,
                    model_to_json, pdf_at, quantile, quantile_array,
                    quantile_derivative, sample)
from .percentile import (FitReport, audit, basis_even_grid, fit_named,
                         fit_named_detailed, fit_pm, pm_grid)
from .pwm import (MomentMatrix, PwmDiagnostics, PwmVector, closed_form_matrix,
                  fit_pwm, model_pwm, moment_matrix, quadrature_matrix,
                  sample_pwm, weibull_moment)
from .refdist import (ReferenceDistribution, make_distribution, parse_spec,
                      quantile_target, ref_cdf, ref_pdf, ref_quantile,
                      ref_sample)
from .weibull import (WeibullBase, basis_vector, cdf_z, pdf_z, quantile_z,
                      quantile_z_array)

__version__ = "0.1.0"

__all__ = [
    "ConditioningError", "DomainError", "InfiniteDerivativeError",
    "InputError", "InsufficientDataError", "IntegrityError",
    "NonMonotoneError", "NumericalError", "OutOfRangeWarning",
    "PolyweibError", "SingularityError", "UnsupportedOperationError",
    "DEFAULT_RANGE", "MonotonicityReport", "PolynomialQuantileModel",
    "cdf_at", "check_monotone", "derivative_array", "model_from_dict",
    "model_from_json", "model_to_json", "pdf_at", "quantile",
    "quantile_array", "quantile_derivative", "sample",
    "FitReport", "audit", "basis_even_grid", "fit_named",
    "fit_named_detailed", "fit_pm", "pm_grid",
    "MomentMatrix", "PwmDiagnostics", "PwmVector", "closed_form_matrix",
    "fit_pwm", "model_pwm", "moment_matrix", "quadrature_matrix",
    "sample_pwm", "weibull_moment",
    "ReferenceDistribution", "make_distribution", "parse_spec",
    "quantile_target", "ref_cdf", "ref_pdf", "ref_quantile", "ref_sample",
    "WeibullBase", "basis_vector", "cdf_z", "pdf_z", "quantile_z",
    "quantile_z_array",
    "__version__",
]
