"""Statistical divergences and their convex conjugates.

Two divergence families are supported, both vanishing at 1 and extended
by +inf to the negative axis:

* Kullback-Leibler:  f(x) = x ln x - x + 1  (with 0 ln 0 = 0), whose
  convex conjugate is g(y) = e^y - 1.
* alpha family (alpha > 0, alpha != 1):
  f(x) = (x^alpha - alpha x + alpha - 1) / (alpha - 1), with conjugate
  g(y) = (1 + (alpha-1)/alpha * y)_+^(alpha/(alpha-1)) - 1.

For alpha > 1 the plus-part makes g constant (-1) below the kink at
y = -alpha/(alpha-1); for alpha in (0, 1) the conjugate is finite only
for y < alpha/(1-alpha) and +inf at and beyond that bound.

The uncertainty-aversion level ``epsilon`` rescales the divergence to
f_eps = f/eps, whose conjugate is g_eps(y) = g(eps*y)/eps.  The inverse
of the rescaled derivative f_eps' coincides with g_eps'(y) = g'(eps*y);
that map builds worst-case densities from dual variables.

All evaluators are elementwise: they accept floats or numpy arrays and
return a float for scalar input.  Infinite values are returned (never
raised) except where noted, so optimizers can probe domain boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

KULLBACK_LEIBLER = "kl"
ALPHA = "alpha"


@dataclass(frozen=True)
class DivergenceSpec:
    """Divergence family, its alpha parameter, and the aversion level epsilon.

    ``alpha`` is ignored for the Kullback-Leibler family.  Requests for
    alpha = 1 under the alpha family are rejected at construction; use
    ``kind="kl"`` instead (the formulas would hit 0/0 at alpha = 1).
    """

    kind: str
    alpha: float | None = None
    epsilon: float = 1.0

    def __post_init__(self):
        if self.kind not in (KULLBACK_LEIBLER, ALPHA):
            raise ValueError(f"unknown divergence kind {self.kind!r}")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if self.kind == ALPHA:
            if self.alpha is None:
                raise ValueError("the alpha family requires an alpha parameter")
            if not self.alpha > 0.0 or self.alpha == 1.0:
                raise ValueError("alpha must be positive and different from 1; "
                                 "use kind='kl' for the alpha -> 1 limit")

    @property
    def is_kl(self) -> bool:
        return self.kind == KULLBACK_LEIBLER

    def conjugate_domain_sup(self) -> float:
        """Supremum of the finite domain of the unscaled conjugate g."""
        if self.kind == ALPHA and self.alpha < 1.0:
            return self.alpha / (1.0 - self.alpha)
        return math.inf


def kl(epsilon: float = 1.0) -> DivergenceSpec:
    return DivergenceSpec(KULLBACK_LEIBLER, epsilon=epsilon)


def alpha_divergence(alpha: float, epsilon: float = 1.0) -> DivergenceSpec:
    return DivergenceSpec(ALPHA, alpha=alpha, epsilon=epsilon)


def _maybe_float(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def _conjugate_pair(kind, alpha, y):
    """(g(y), g'(y)) elementwise as arrays, with quiet +inf outside dom(g).

    On the alpha > 1 flat region both return their one-sided limits
    (g = -1, g' = 0).  Shared by every solver hot path, so the power/exp
    is evaluated once and g is recovered from g' via g = g' * base - 1.
    """
    y = np.asarray(y, dtype=float)
    if kind == KULLBACK_LEIBLER:
        with np.errstate(over="ignore"):
            gp = np.exp(y)
        return gp - 1.0, gp
    c = (alpha - 1.0) / alpha
    base = 1.0 + c * y
    if alpha > 1.0:
        base = np.maximum(base, 0.0)
        with np.errstate(over="ignore"):
            gp = base ** (1.0 / (alpha - 1.0))
        return gp * base - 1.0, gp
    ok = base > 0.0
    safe = np.where(ok, base, 1.0)
    with np.errstate(over="ignore", divide="ignore"):
        gp = np.where(ok, safe ** (1.0 / (alpha - 1.0)), np.inf)
    with np.errstate(invalid="ignore"):
        g = np.where(ok, gp * np.where(ok, base, np.inf) - 1.0, np.inf)
    return g, gp


def divergence_value(spec: DivergenceSpec, x):
    """f(x), extended by +inf for x < 0; f(1) = 0 and f(0) = 1 exactly."""
    arr = np.asarray(x, dtype=float)
    nonneg = arr >= 0.0
    safe = np.where(nonneg, arr, 0.0)
    if spec.is_kl:
        vals = special.xlogy(safe, safe) - safe + 1.0
    else:
        a = spec.alpha
        vals = (safe ** a - a * safe + a - 1.0) / (a - 1.0)
    return _maybe_float(np.where(nonneg, vals, np.inf), x)


def conjugate_value(spec: DivergenceSpec, y):
    """The unscaled convex conjugate g(y); +inf beyond the alpha < 1 bound."""
    g, _ = _conjugate_pair(spec.kind, spec.alpha, y)
    return _maybe_float(g, y)


def scaled_conjugate_value(spec: DivergenceSpec, y):
    """g_eps(y) = g(eps*y)/eps, the conjugate of the rescaled divergence."""
    eps = spec.epsilon
    g, _ = _conjugate_pair(spec.kind, spec.alpha, eps * np.asarray(y, dtype=float))
    return _maybe_float(g / eps, y)


def conjugate_derivative(spec: DivergenceSpec, y):
    """g'(y); 0 on the alpha > 1 flat region (minimal-norm subgradient).

    Raises :class:`DomainError` where g itself is +inf (alpha < 1 at or
    beyond y = alpha/(1-alpha)); mere floating-point overflow of e^y for
    huge y is returned as +inf, not an error.
    """
    arr = np.asarray(y, dtype=float)
    if spec.kind == ALPHA and spec.alpha > 1.0:
        c = (spec.alpha - 1.0) / spec.alpha
        flat = 1.0 + c * arr <= 0.0
        gp = np.where(flat, 0.0, _conjugate_pair(spec.kind, spec.alpha, arr)[1])
        return _maybe_float(gp, y)
    g, gp = _conjugate_pair(spec.kind, spec.alpha, arr)
    if spec.kind == ALPHA and np.any(np.isinf(gp)):
        raise DomainError(
            f"conjugate derivative requested at y >= {spec.conjugate_domain_sup()} "
            f"where g is infinite (alpha = {spec.alpha})")
    return _maybe_float(gp, y)


def scaled_conjugate_derivative(spec: DivergenceSpec, y):
    """g_eps'(y) = g'(eps*y), the inverse of the rescaled derivative f_eps'.

    Always >= 0.  For alpha in (0, 1) the result is +inf where the
    plus-part argument is nonpositive; feasibility is the caller's duty.
    """
    _, gp = _conjugate_pair(spec.kind, spec.alpha,
                            spec.epsilon * np.asarray(y, dtype=float))
    return _maybe_float(gp, y)
