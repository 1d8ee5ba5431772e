"""Shared explicit-Euler solver for the bound objectives.

Both bound problems reduce to optimizing, over mu in R and t > 0,

    upper:  minimize  A(mu, t) = mu + t * (eps + E[g((X - mu)/t)])
    lower:  maximize  B(mu, t) = mu - t * (eps + E[g(-(X - mu)/t)])

with the unscaled conjugate g and the aversion level eps appearing as an
additive constant (the substitution t -> eps*t folds the scaling into the
objective).  The one-parameter regret problems are the same objectives
with mu frozen at 0.

The flow integrates (mu, t) along the (sign-adjusted) gradient with the
t component premultiplied by 1/eps, using a fixed pseudo-time increment.
The increment is halved, for the current iteration only, whenever the
proposed point is infeasible (objective not finite), crosses the t floor,
or fails to improve the objective.  The improvement test is what keeps
the fixed-increment flow stable when the curvature 1/t at the optimum
exceeds the explicit-Euler stability bound; it leaves trajectories in the
well-conditioned region untouched because there a full step always
improves.  Iteration stops once both applied coordinate updates fall
below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergence import DivergenceSpec, _conjugate_pair
from .errors import InfeasibleProblemError, NonConvergenceError
from .gamma import LOWER, UPPER, MomentMap, check_existence
from .quantize import DiscreteSample, payoff_values

T_FLOOR = 1e-8
MAX_RESTART_DOUBLINGS = 60
MAX_STEP_HALVINGS = 60
DEFAULT_STEP = 0.5
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10 ** 6
_HUGE = 1e100  # treat astronomically large expectations as infeasible
# Objective values carry float noise of order ulp(|mu| + t*(eps + E[g])),
# so a step only counts as genuinely worsening when it exceeds this floor;
# anything unresolved is accepted as is.  2^-43 is ~1e-13, a few hundred
# ulps of margin over the reduction error of an 8192-atom expectation.
_NOISE_FLOOR = 2.0 ** -43
# t is a scale variable, so one Euler step may grow it at most this factor.
# Without the cap, the 1/eps-scaled t updates at very small eps overshoot
# the optimum by orders of magnitude and the way back is capped at
# step*eps/eps = step per iteration, which busts any iteration budget.
_MAX_T_GROWTH = 4.0
# Value-plateau exit (mu-frozen mode only): consecutive accepted steps whose
# objective moves by less than this relative amount before declaring the
# value converged, and the window length required.
_PLATEAU_RTOL = 1e-14
_PLATEAU_WINDOW = 64


@dataclass(frozen=True)
class DescentResult:
    mu: float
    t: float
    value: float
    converged: bool
    iterations: int


class _Evaluator:
    """Fused value/gradient of the bound objective at (mu, t).

    With s = +1 (upper) or -1 (lower) and y = s*(X - mu)/t, both sides
    share one form:

        value = mu + s*t*(eps + E[g(y)])
        d/dmu = 1 - E[g'(y)]
        d/dt  = s*(eps + E[g(y)] - E[y g'(y)])

    The expectations reuse preallocated buffers and the identity
    g = g' * base - 1 of the alpha family (for Kullback-Leibler,
    g = g' - 1), so each call is one exp/pow pass plus BLAS reductions.
    Infeasible points return (s*inf, nan, nan) instead of raising.
    """

    def __init__(self, spec: DivergenceSpec, x: np.ndarray, sign: float):
        self.x = x
        self.sign = sign
        self.eps = spec.epsilon
        self.is_kl = spec.is_kl
        self.alpha = spec.alpha
        self.n = x.size
        self._y = np.empty_like(x)
        self._gp = np.empty_like(x)
        if not self.is_kl:
            self._base = np.empty_like(x)
            self._c = (spec.alpha - 1.0) / spec.alpha
            self._q = 1.0 / (spec.alpha - 1.0)

    def _bad(self):
        return self.sign * math.inf, math.nan, math.nan

    def __call__(self, mu, t):
        y, gp = self._y, self._gp
        np.subtract(self.x, mu, out=y)
        y *= self.sign / t
        if self.is_kl:
            with np.errstate(over="ignore"):
                np.exp(y, out=gp)
            egp = float(gp.mean())
            if not egp < _HUGE:  # catches inf and nan
                return self._bad()
            eg = egp - 1.0
        else:
            base = self._base
            np.multiply(y, self._c, out=base)
            base += 1.0
            if self.alpha > 1.0:
                np.maximum(base, 0.0, out=base)
            elif not float(base.min()) > 0.0:
                return self._bad()
            if self._q == 2.0:
                np.multiply(base, base, out=gp)
            elif self._q == -2.0:
                np.multiply(base, base, out=gp)
                np.reciprocal(gp, out=gp)
            else:
                with np.errstate(over="ignore", divide="ignore"):
                    np.power(base, self._q, out=gp)
            eg = float(np.dot(gp, base)) / self.n - 1.0
            if not eg < _HUGE:
                return self._bad()
            egp = float(gp.mean())
        eygp = float(np.dot(y, gp)) / self.n
        if not math.isfinite(eygp):
            return self._bad()
        s = self.sign
        return (mu + s * t * (self.eps + eg), 1.0 - egp,
                s * (self.eps + eg - eygp))


def upper_evaluator(spec: DivergenceSpec, x: np.ndarray):
    """value/gradient closure for the upper objective A(mu, t)."""
    return _Evaluator(spec, x, 1.0)


def lower_evaluator(spec: DivergenceSpec, x: np.ndarray):
    """value/gradient closure for the lower objective B(mu, t)."""
    return _Evaluator(spec, x, -1.0)


def euler_flow(evaluate, mu0: float, t0: float, *, epsilon: float,
               maximize: bool = False, freeze_mu: bool = False,
               project_t: bool = False, step: float = DEFAULT_STEP,
               tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
               scale_t_by_inv_eps: bool = True,
               plateau_exit: bool = False) -> DescentResult:
    """Integrate the scaled gradient flow until both updates drop below tol.

    ``project_t`` clamps proposals onto t >= T_FLOOR (the regret mode);
    otherwise sub-floor proposals are rejected and retried with a halved
    increment (the two-parameter mode).

    ``plateau_exit`` adds a second convergence rule: terminate once the
    objective has stayed put (relative moves below float resolution) for a
    long run of accepted steps.  The one-parameter regret flows need it
    when the optimum is an unattained limit at t -> 0 (constant payoffs):
    the gradient decays super-exponentially along the trajectory, so the
    coordinate-update rule alone would crawl past any iteration budget
    with the value long since converged.
    """
    sign = -1.0 if maximize else 1.0  # everything below minimizes sign*value
    mu, t = float(mu0), float(t0)
    value, gmu, gt = evaluate(mu, t)
    doublings = 0
    while not math.isfinite(sign * value):
        if doublings >= MAX_RESTART_DOUBLINGS:
            raise InfeasibleProblemError(
                "objective is infinite for every probed t; no feasible "
                "scale parameter found")
        t *= 2.0
        doublings += 1
        value, gmu, gt = evaluate(mu, t)

    tscale = (1.0 / epsilon) if scale_t_by_inv_eps else 1.0
    eta_base = step  # shrinks permanently once a step worsens the objective
    eta_min = step * 2.0 ** -50
    plateau_run = 0
    for iteration in range(1, max_iter + 1):
        dir_mu = 0.0 if freeze_mu else -sign * gmu
        dir_t = -sign * gt * tscale
        eta = eta_base
        accepted = False
        worsened = False
        for _ in range(MAX_STEP_HALVINGS + 1):
            mu_new = mu + eta * dir_mu
            t_new = min(t + eta * dir_t, _MAX_T_GROWTH * t)
            if t_new <= T_FLOOR:
                if project_t:
                    t_new = T_FLOOR
                else:
                    eta *= 0.5
                    continue
            trial = evaluate(mu_new, t_new)
            floor = _NOISE_FLOOR * (1.0 + abs(value) + abs(t))
            if math.isfinite(sign * trial[0]) and (
                    sign * trial[0] <= sign * value + floor):
                accepted = True
                break
            if math.isfinite(sign * trial[0]):
                # A resolved worsening means the increment exceeds the local
                # explicit-Euler stability bound; keep the reduction for the
                # rest of the solve or the iterate orbits the optimum forever
                # instead of entering it.  (Sub-floor fluctuations are taken
                # as is: at a stable increment the flow contracts without
                # needing the comparison.)
                worsened = True
            eta *= 0.5
        if worsened:
            eta_base = max(eta, eta_min)
        if not accepted:
            # No improving direction at any admissible increment: stationary
            # to machine precision if even the full-size update is below tol.
            if abs(step * dir_mu) < tol and abs(step * dir_t) < tol:
                return DescentResult(mu, t, value, True, iteration)
            raise NonConvergenceError(
                f"no admissible improving step at iteration {iteration} "
                f"(mu={mu:.6g}, t={t:.6g}, value={value:.6g})")
        d_mu = abs(mu_new - mu)
        d_t = abs(t_new - t)
        d_value = abs(trial[0] - value)
        mu, t = mu_new, t_new
        value, gmu, gt = trial
        if d_mu < tol and d_t < tol:
            return DescentResult(mu, t, value, True, iteration)
        if plateau_exit:
            if d_value <= _PLATEAU_RTOL * max(1.0, abs(value)):
                plateau_run += 1
                if plateau_run >= _PLATEAU_WINDOW:
                    return DescentResult(mu, t, value, True, iteration)
            else:
                plateau_run = 0
    raise NonConvergenceError(
        f"coordinate updates still above {tol:g} after {max_iter} iterations "
        f"(mu={mu:.6g}, t={t:.6g}, value={value:.6g})")


def require_feasible(spec: DivergenceSpec, sample: DiscreteSample,
                     payoff, side: str) -> None:
    """Raise InfeasibleProblemError when theory rules the bound out.

    The check applies only when the payoff is a declared power map over a
    gamma-backed sample; generic (bounded) payoffs are always admitted.
    """
    moment_map = MomentMap(1.0) if payoff is None else payoff
    if not isinstance(moment_map, MomentMap) or sample.source is None:
        return
    verdict = check_existence(spec, moment_map, sample.source, side)
    if not verdict.feasible:
        raise InfeasibleProblemError(verdict.reason)


def solve_bound(spec: DivergenceSpec, sample: DiscreteSample, payoff,
                side: str, *, freeze_mu: bool = False, init_mu: float = 0.0,
                init_t: float = 10.0, step: float = DEFAULT_STEP,
                tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                scale_t_by_inv_eps: bool = True,
                feasibility_check: bool = True) -> DescentResult:
    """Solve one bound problem (full two-parameter or mu-frozen regret)."""
    if side not in (UPPER, LOWER):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if feasibility_check:
        require_feasible(spec, sample, payoff, side)
    x = payoff_values(sample, payoff)
    if side == UPPER:
        evaluate = upper_evaluator(spec, x)
        maximize = False
    else:
        evaluate = lower_evaluator(spec, x)
        maximize = True
    return euler_flow(evaluate, init_mu if not freeze_mu else 0.0, init_t,
                      epsilon=spec.epsilon, maximize=maximize,
                      freeze_mu=freeze_mu, project_t=freeze_mu, step=step,
                      tol=tol, max_iter=max_iter,
                      scale_t_by_inv_eps=scale_t_by_inv_eps,
                      plateau_exit=freeze_mu)
