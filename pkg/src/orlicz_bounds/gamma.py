"""Gamma distribution machinery: density, CDF, quantiles, moment fits.

The density is p(u) = u^(a-1) exp(-u/b) / (Gamma(a) b^a) with shape a and
scale b.  Fitting matches the first two sample moments: b = variance/mean
and a = mean^2/variance, using the arithmetic mean and the unbiased
(1/(K-1)) variance estimator.  ``check_existence`` encodes when the upper
and lower bound problems for a power payoff X(u) = u^gamma are well posed
under each divergence family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .divergence import ALPHA, DivergenceSpec
from .errors import DegenerateSampleError

UPPER = "upper"
LOWER = "lower"
SIDES = (UPPER, LOWER)


def _validate_side(side: str) -> str:
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    return side


@dataclass(frozen=True)
class GammaParams:
    """Shape ``a`` (dimensionless) and scale ``b`` (units of the variable)."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("gamma shape and scale must both be positive")


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    skewness: float
    kurtosis: float  # excess

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be nonnegative")


@dataclass(frozen=True)
class MomentMap:
    """Power payoff u -> u^gamma_exponent evaluated on positive arguments."""

    gamma_exponent: float

    def __post_init__(self):
        if self.gamma_exponent == 0.0:
            raise ValueError("the moment exponent must be nonzero")

    def __call__(self, u):
        return np.asarray(u, dtype=float) ** self.gamma_exponent


IDENTITY = MomentMap(1.0)


@dataclass(frozen=True)
class Feasibility:
    """Verdict of ``check_existence`` with a human-readable reason.

    ``small_eps_only`` flags the borderline case that is well posed only
    for sufficiently small aversion levels.
    """

    feasible: bool
    reason: str
    small_eps_only: bool = False

    def __bool__(self) -> bool:
        return self.feasible


def pdf(params: GammaParams, u):
    """Density at u > 0, computed in log space.  u = 0 returns the limit
    (0 for a > 1, 1/b for a = 1, +inf for a < 1); negative u gives 0."""
    a, b = params.a, params.b
    arr = np.asarray(u, dtype=float)
    pos = arr > 0.0
    safe = np.where(pos, arr, 1.0)
    logp = (a - 1.0) * np.log(safe) - safe / b - special.gammaln(a) - a * math.log(b)
    with np.errstate(over="ignore"):
        vals = np.where(pos, np.exp(logp), 0.0)
    if a < 1.0:
        vals = np.where(arr == 0.0, np.inf, vals)
    elif a == 1.0:
        vals = np.where(arr == 0.0, 1.0 / b, vals)
    if np.ndim(u) == 0:
        return float(vals)
    return vals


def cdf(params: GammaParams, u):
    """Regularized lower incomplete gamma P(a, u/b); 0 for u <= 0."""
    arr = np.asarray(u, dtype=float)
    vals = special.gammainc(params.a, np.maximum(arr, 0.0) / params.b)
    if np.ndim(u) == 0:
        return float(vals)
    return vals


def quantile(params: GammaParams, p):
    """Inverse CDF for p in (0, 1); round-trips through ``cdf`` to ~1e-14."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("quantile probabilities must lie strictly in (0, 1)")
    vals = params.b * special.gammaincinv(params.a, arr)
    if np.ndim(p) == 0:
        return float(vals)
    return vals


def fit_moment_matching(samples) -> GammaParams:
    """Match mean and unbiased variance: a = mean^2/var, b = var/mean."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DegenerateSampleError("need at least two observations to fit")
    mean = float(arr.mean())
    var = float(arr.var(ddof=1))
    if var <= 0.0:
        raise DegenerateSampleError("sample variance is zero; gamma fit undefined")
    if mean <= 0.0:
        raise DegenerateSampleError("sample mean must be positive")
    return GammaParams(a=mean * mean / var, b=var / mean)


def theoretical_moments(params: GammaParams) -> MomentSummary:
    """Model moments: mean ab, variance ab^2, skew 2/sqrt(a), excess kurt 6/a."""
    a, b = params.a, params.b
    return MomentSummary(mean=a * b, variance=a * b * b,
                         skewness=2.0 / math.sqrt(a), kurtosis=6.0 / a)


def empirical_moments(samples) -> MomentSummary:
    """Sample mean, unbiased variance, and biased standardized central moments
    m3/m2^(3/2) and m4/m2^2 - 3 for skewness and excess kurtosis."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DegenerateSampleError("need at least two observations")
    mean = float(arr.mean())
    var = float(arr.var(ddof=1))
    if var <= 0.0:
        raise DegenerateSampleError("sample variance is zero")
    centered = arr - mean
    m2 = float(np.mean(centered ** 2))
    m3 = float(np.mean(centered ** 3))
    m4 = float(np.mean(centered ** 4))
    return MomentSummary(mean=mean, variance=var,
                         skewness=m3 / m2 ** 1.5, kurtosis=m4 / (m2 * m2) - 3.0)


def check_existence(spec: DivergenceSpec, moment_map: MomentMap,
                    params: GammaParams, side: str) -> Feasibility:
    """Whether the bound problem for payoff u^gamma exists on this side.

    Lower bounds exist for every exponent under both families.  Upper
    bounds require 0 < gamma <= 1 under Kullback-Leibler; under the alpha
    family with alpha > 1 they require gamma > -a(alpha-1)/alpha (equality
    is well posed only for small epsilon); with alpha in (0, 1) no
    minimizing pair exists for an unbounded nonnegative payoff.
    """
    _validate_side(side)
    g = moment_map.gamma_exponent
    if side == LOWER:
        return Feasibility(True, "lower bounds exist for every moment exponent")
    if spec.is_kl:
        if 0.0 < g <= 1.0:
            return Feasibility(True, "upper bound under KL: exponent in (0, 1]")
        return Feasibility(
            False, f"upper bound under KL requires an exponent in (0, 1], got {g}")
    if spec.alpha > 1.0:
        threshold = -params.a * (spec.alpha - 1.0) / spec.alpha
        if g > threshold:
            return Feasibility(
                True, f"upper bound: exponent {g} above the tail threshold {threshold:.6g}")
        if g == threshold:
            return Feasibility(
                True, "upper bound exists only for sufficiently small epsilon "
                      f"(exponent equals the tail threshold {threshold:.6g})",
                small_eps_only=True)
        return Feasibility(
            False, f"upper bound: exponent {g} at or below the tail threshold "
                   f"{threshold:.6g}")
    return Feasibility(
        False, "no minimizing pair exists for the upper bound when alpha is in "
               "(0, 1) and the payoff is nonnegative and unbounded")
