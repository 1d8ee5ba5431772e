"""Divergence-constrained worst-case expectations and distorted densities.

The upper bound maximizes E_Q[X] over all laws Q whose divergence from
the baseline P stays within the budget eps; the lower bound minimizes it.
Both reduce to a two-parameter objective over a location mu and a scale
t > 0 (see :mod:`._solver`), solved by the shared Euler kernel:

    upper = inf_{mu, t}  mu + t * (eps + E[g((X - mu)/t)])
    lower = sup_{mu, t}  mu - t * (eps + E[g(-(X - mu)/t)])

At a converged optimum the worst-case law has density Z against the
baseline, with Z = g'(+(X - mu)/t) on the upper side and
Z = g'(-(X - mu)/t) on the lower side; the optimality conditions force
E[Z] = 1 and E[X Z] equal to the bound itself, which is verified before
any density is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._solver import (DEFAULT_MAX_ITER, DEFAULT_STEP, DEFAULT_TOL,
                      lower_evaluator, solve_bound, upper_evaluator)
from .divergence import ALPHA, DivergenceSpec, _conjugate_pair
from .errors import DomainError, NormalizationError
from .gamma import LOWER, UPPER, pdf, quantile
from .quantize import DiscreteSample, payoff_values

DENSITY_GRID_SIZE = 512
DENSITY_GRID_QUANTILE = 0.9999


@dataclass(frozen=True)
class OptimResult:
    """Converged location/scale pair and the bound value they realize."""

    mu: float
    t: float
    value: float
    converged: bool
    iterations: int

    def __post_init__(self):
        if not self.t > 0.0:
            raise ValueError("the scale parameter t must stay positive")


@dataclass(frozen=True)
class DistortedDensity:
    """Baseline density, worst-case reweighting Z, and their product on a grid."""

    grid: np.ndarray
    base_density: np.ndarray
    rn_values: np.ndarray
    product: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.rn_values) < 0.0):
            raise ValueError("a density ratio cannot be negative")


def risk_objective(spec: DivergenceSpec, sample: DiscreteSample, payoff,
                   mu: float, t: float) -> float:
    """The upper-side objective mu + t*(eps + E[g((X - mu)/t)]).

    Returns +inf where the conjugate blows up at some atom (alpha < 1
    with (X - mu)/t at or beyond alpha/(1 - alpha)).
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = payoff_values(sample, payoff)
    g, _ = _conjugate_pair(spec.kind, spec.alpha, (x - mu) / t)
    eg = float(np.mean(g))
    if not math.isfinite(eg):
        return math.inf
    return mu + t * (spec.epsilon + eg)


def risk_gradient(spec: DivergenceSpec, sample: DiscreteSample, payoff,
                  mu: float, t: float) -> tuple[float, float]:
    """(d/dmu, d/dt) of ``risk_objective``:

        d/dmu = 1 - E[g'((X - mu)/t)]
        d/dt  = eps + E[g((X - mu)/t)] - (1/t) E[(X - mu) g'((X - mu)/t)]

    Raises DomainError where the objective is infinite.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = payoff_values(sample, payoff)
    value, gmu, gt = upper_evaluator(spec, x)(mu, t)
    if not math.isfinite(value):
        raise DomainError(
            f"objective is infinite at (mu={mu:.6g}, t={t:.6g}); gradient undefined")
    return gmu, gt


def upper_risk(spec: DivergenceSpec, sample: DiscreteSample, payoff=None, *,
               init: tuple[float, float] = (0.0, 10.0),
               step: float = DEFAULT_STEP, tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER,
               scale_t_by_inv_eps: bool = True) -> OptimResult:
    """Worst-case overestimate of E[X] within divergence budget eps.

    Raises InfeasibleProblemError for power payoffs over a gamma baseline
    whenever no minimizing pair exists (e.g. alpha in (0, 1)), and
    NonConvergenceError past the iteration cap.
    """
    res = solve_bound(spec, sample, payoff, UPPER, init_mu=init[0],
                      init_t=init[1], step=step, tol=tol, max_iter=max_iter,
                      scale_t_by_inv_eps=scale_t_by_inv_eps)
    return OptimResult(res.mu, res.t, res.value, res.converged, res.iterations)


def lower_risk(spec: DivergenceSpec, sample: DiscreteSample, payoff=None, *,
               init: tuple[float, float] = (0.0, 10.0),
               step: float = DEFAULT_STEP, tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER,
               scale_t_by_inv_eps: bool = True) -> OptimResult:
    """Worst-case underestimate of E[X] within divergence budget eps."""
    res = solve_bound(spec, sample, payoff, LOWER, init_mu=init[0],
                      init_t=init[1], step=step, tol=tol, max_iter=max_iter,
                      scale_t_by_inv_eps=scale_t_by_inv_eps)
    out = OptimResult(res.mu, res.t, res.value, res.converged, res.iterations)
    if spec.kind == ALPHA and spec.alpha < 1.0:
        # Any maximizer must keep the dual variable inside the conjugate's
        # domain: (mu - min X)/t strictly below alpha/(1 - alpha).  With the
        # smallest payoff value at 0 this is the location/scale ratio bound
        # of the continuous theory.
        x_min = float(np.min(payoff_values(sample, payoff)))
        bound = spec.alpha / (1.0 - spec.alpha)
        ratio = (out.mu - x_min) / out.t
        if ratio > bound * (1.0 + 1e-9):
            raise NormalizationError(
                f"lower-bound optimum escaped the conjugate domain: "
                f"(mu - min X)/t = {ratio:.6g} >= {bound:.6g}")
    return out


def _rn_on_atoms(spec: DivergenceSpec, x: np.ndarray, opt: OptimResult,
                 side: str) -> np.ndarray:
    sign = 1.0 if side == UPPER else -1.0
    _, gp = _conjugate_pair(spec.kind, spec.alpha, sign * (x - opt.mu) / opt.t)
    return gp


def worst_case_density(spec: DivergenceSpec, sample: DiscreteSample, payoff,
                       opt: OptimResult, side: str, *,
                       grid_size: int = DENSITY_GRID_SIZE) -> DistortedDensity:
    """Density ratio Z of the worst-case law, paired with the baseline pdf.

    Verifies E[Z] = 1 and E[X Z] = bound value (relative 1e-6) over the
    atoms before returning; a violation signals a bad optimum and raises
    NormalizationError.
    """
    if side not in (UPPER, LOWER):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if not opt.converged:
        raise ValueError("worst_case_density requires a converged optimum")
    if sample.source is None:
        raise ValueError("worst_case_density needs a gamma-backed sample")
    x = payoff_values(sample, payoff)
    z = _rn_on_atoms(spec, x, opt, side)
    ez = float(np.mean(z))
    if abs(ez - 1.0) > 1e-6:
        raise NormalizationError(
            f"E[Z] = {ez:.9f} deviates from 1; the optimum does not define "
            "a probability law")
    exz = float(np.mean(x * z))
    if abs(exz - opt.value) > 1e-6 * max(1e-12, abs(opt.value)):
        raise NormalizationError(
            f"E[XZ] = {exz:.9g} fails to reproduce the bound {opt.value:.9g}")
    grid = np.linspace(0.0, quantile(sample.source, DENSITY_GRID_QUANTILE),
                       grid_size)
    payoff_on_grid = grid if payoff is None else np.asarray(payoff(grid), float)
    sign = 1.0 if side == UPPER else -1.0
    _, z_grid = _conjugate_pair(spec.kind, spec.alpha,
                                sign * (payoff_on_grid - opt.mu) / opt.t)
    base = pdf(sample.source, grid)
    return DistortedDensity(grid=grid, base_density=base, rn_values=z_grid,
                            product=base * z_grid)


def safety_probability(spec: DivergenceSpec, sample: DiscreteSample,
                       threshold: float, side: str, *,
                       init: tuple[float, float] = (0.0, 10.0),
                       step: float = DEFAULT_STEP, tol: float = DEFAULT_TOL,
                       max_iter: int = DEFAULT_MAX_ITER) -> float:
    """P(X <= threshold) under the worst-case law for the identity payoff.

    The upper side reweights toward large values and therefore yields the
    pessimistic (smaller) probability; the lower side the optimistic one.
    """
    if not threshold > 0.0:
        raise ValueError("threshold must be positive")
    solver = upper_risk if side == UPPER else lower_risk
    opt = solver(spec, sample, None, init=init, step=step, tol=tol,
                 max_iter=max_iter)
    z = _rn_on_atoms(spec, sample.atoms, opt, side)
    return float(np.mean(z * (sample.atoms <= threshold)))
