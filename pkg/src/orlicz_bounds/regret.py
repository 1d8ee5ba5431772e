"""Upper and lower regret functionals and the associated Orlicz norms.

For a payoff X over a discretized baseline law, with scaled conjugate
g_eps, the pair of regrets is

    upper:  V(X) = inf_{t>0}  t * (1 + E[g_eps( X/t)])
    lower:  W(X) = sup_{t>0} -t * (1 + E[g_eps(-X/t)])

so that W(X) <= E[X] <= V(X) for every aversion level.  Both are computed
by the shared Euler kernel with the location parameter frozen at zero;
the reported ``t_star`` is the optimizer of the displayed objective
(i.e. eps times the kernel's internal scale variable).

The Amemiya norm inf_{t>0} t*(1 + E[g_eps(|X|/t)]) coincides with V on
nonnegative payoffs, and the Luxemburg gauge norm (smallest lambda with
E[g_eps(|X|/lambda)] <= 1) sandwiches it within a factor of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._solver import (DEFAULT_MAX_ITER, DEFAULT_STEP, DEFAULT_TOL,
                      require_feasible, solve_bound)
from .divergence import DivergenceSpec, scaled_conjugate_value
from .gamma import LOWER, UPPER, MomentMap
from .quantize import DiscreteSample, payoff_values


@dataclass(frozen=True)
class RegretResult:
    value: float
    t_star: float
    converged: bool
    iterations: int

    def __post_init__(self):
        if not self.t_star > 0.0:
            raise ValueError("the optimizing t must be positive")


def _solve_regret(spec, sample, payoff, side, init_t, step, tol, max_iter):
    res = solve_bound(spec, sample, payoff, side, freeze_mu=True,
                      init_t=init_t, step=step, tol=tol, max_iter=max_iter)
    return RegretResult(value=res.value, t_star=spec.epsilon * res.t,
                        converged=res.converged, iterations=res.iterations)


def upper_regret(spec: DivergenceSpec, sample: DiscreteSample, payoff=None, *,
                 init_t: float = 10.0, step: float = DEFAULT_STEP,
                 tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> RegretResult:
    """V(X): the tightest upper bound of E[X] at this aversion level.

    Raises InfeasibleProblemError for power payoffs over a gamma baseline
    when no optimizer exists (alpha in (0, 1) on the upper side).
    """
    return _solve_regret(spec, sample, payoff, UPPER, init_t, step, tol, max_iter)


def lower_regret(spec: DivergenceSpec, sample: DiscreteSample, payoff=None, *,
                 init_t: float = 10.0, step: float = DEFAULT_STEP,
                 tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> RegretResult:
    """W(X): the matching lower bound of E[X] at this aversion level."""
    return _solve_regret(spec, sample, payoff, LOWER, init_t, step, tol, max_iter)


class _AbsolutePayoff:
    """|payoff|, evaluated elementwise; used by the norm computations."""

    def __init__(self, payoff):
        self._payoff = payoff

    def __call__(self, u):
        if self._payoff is None:
            return np.abs(np.asarray(u, dtype=float))
        return np.abs(np.asarray(self._payoff(u), dtype=float))


def amemiya_norm(young: DivergenceSpec, sample: DiscreteSample, payoff=None, *,
                 init_t: float = 10.0, step: float = DEFAULT_STEP,
                 tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> float:
    """inf_{t>0} t*(1 + E[g_eps(|X|/t)]); equals upper_regret for X >= 0."""
    require_feasible(young, sample, payoff, UPPER)
    if not np.any(payoff_values(sample, payoff)):
        return 0.0
    res = _solve_regret(young, sample, _AbsolutePayoff(payoff), UPPER,
                        init_t, step, tol, max_iter)
    return res.value


def luxemburg_norm(young: DivergenceSpec, sample: DiscreteSample,
                   payoff=None) -> float:
    """Smallest lambda > 0 with E[g_eps(|X|/lambda)] <= 1, by bisection
    to relative width 1e-10; the zero payoff has norm 0."""
    x = np.abs(payoff_values(sample, payoff))
    if not np.any(x):
        return 0.0

    def unit_ball_excess(lam):
        vals = scaled_conjugate_value(young, x / lam)
        mean = float(np.mean(vals))
        return mean - 1.0 if math.isfinite(mean) else math.inf

    hi = float(np.max(x))
    for _ in range(200):
        if unit_ball_excess(hi) <= 0.0:
            break
        hi *= 2.0
    else:
        raise ValueError("could not bracket the gauge norm from above")
    lo = hi
    for _ in range(200):
        candidate = lo / 2.0
        if unit_ball_excess(candidate) > 0.0:
            lo = candidate
            break
        lo = candidate
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if unit_ball_excess(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return hi
