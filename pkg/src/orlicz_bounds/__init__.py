"""Consistent lower/upper bounds on statistics of random variables.

A single divergence family (Kullback-Leibler or alpha) and one aversion
level epsilon induce a matched pair of regret functionals W <= E[X] <= V
and a tighter pair of worst-case expectations R_lower <= E[X] <= R_upper,
all computed against a gamma baseline discretized into uniform-weight
quantile atoms.  The worst-case reweighting densities and the safety
probability P(X <= threshold) under them are exposed as well.
"""

from .divergence import (ALPHA, KULLBACK_LEIBLER, DivergenceSpec,
                         alpha_divergence, conjugate_derivative,
                         conjugate_value, divergence_value, kl,
                         scaled_conjugate_derivative, scaled_conjugate_value)
from .errors import (DegenerateSampleError, DomainError, InfeasibleProblemError,
                     InputDataError, MalformedRowError, NonConvergenceError,
                     NonMonotoneDateError, NormalizationError, TooFewRowsError)
from .gamma import (LOWER, UPPER, Feasibility, GammaParams, MomentMap,
                    MomentSummary, cdf, check_existence, empirical_moments,
                    fit_moment_matching, pdf, quantile, theoretical_moments)
from .quantize import DEFAULT_M, DiscreteSample, expect, quantize, sup_cdf_error
from .regret import (RegretResult, amemiya_norm, lower_regret, luxemburg_norm,
                     upper_regret)
from .risk import (DistortedDensity, OptimResult, lower_risk, risk_gradient,
                   risk_objective, safety_probability, upper_risk,
                   worst_case_density)
from .cli import (RunConfig, SweepReport, SweepRow, emit, fit_command,
                  distort_command, ingest_csv, run_sweep)

__version__ = "0.1.0"

__all__ = [
    "ALPHA", "KULLBACK_LEIBLER", "LOWER", "UPPER", "DEFAULT_M",
    "DivergenceSpec", "kl", "alpha_divergence",
    "divergence_value", "conjugate_value", "scaled_conjugate_value",
    "conjugate_derivative", "scaled_conjugate_derivative",
    "GammaParams", "MomentSummary", "MomentMap", "Feasibility",
    "pdf", "cdf", "quantile", "fit_moment_matching", "theoretical_moments",
    "empirical_moments", "check_existence",
    "DiscreteSample", "quantize", "expect", "sup_cdf_error",
    "RegretResult", "upper_regret", "lower_regret", "amemiya_norm",
    "luxemburg_norm",
    "OptimResult", "DistortedDensity", "risk_objective", "risk_gradient",
    "upper_risk", "lower_risk", "worst_case_density", "safety_probability",
    "RunConfig", "SweepRow", "SweepReport", "ingest_csv", "run_sweep", "emit",
    "fit_command", "distort_command",
    "DomainError", "DegenerateSampleError", "InfeasibleProblemError",
    "NonConvergenceError", "NormalizationError", "InputDataError",
    "MalformedRowError", "NonMonotoneDateError", "TooFewRowsError",
]
