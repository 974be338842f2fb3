"""Kolmogorov-Smirnov goodness of fit for fitted payment models.

The statistic is the supremum distance between the empirical cdf and the
fitted payment cdf over the payment support.  Both functions are step or
piecewise-monotone, so the supremum is attained at a jump point of one of
them approached from either side; the implementation evaluates both
one-sided differences at every data value and at the atoms of the fitted
cdf (zero for per-loss data, and the censoring point).

The decision threshold comes from the asymptotic Kolmogorov distribution
even though parameters are estimated and part of the data is censored;
the resulting test is approximate and the caveat travels with the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError
from .mle import FitResult
from .payments import (
    GroundUpLognormal,
    PaymentDistribution,
    PaymentKind,
    PaymentSample,
)

__all__ = ["KsResult", "ks_statistic", "ks_critical_value"]


@dataclass(frozen=True)
class KsResult:
    """KS statistic, its threshold, and the accept/reject decision.

    ``decision`` is 0 when the fitted model is plausible at ``level`` and
    1 when it is rejected; the comparison is strict (``statistic`` above
    ``critical_value``).
    """

    statistic: float
    critical_value: float
    decision: int
    level: float

    note = ("asymptotic Kolmogorov threshold; parameter estimation and "
            "censoring are not corrected for")


def ks_critical_value(n: int, level: float) -> float:
    """Asymptotic Kolmogorov critical value for a sample of size n."""
    if not 0.0 < level < 1.0:
        raise DomainError("significance level must lie in (0, 1)")
    return float(special.kolmogi(level)) / math.sqrt(n)


def ks_statistic(sample: PaymentSample, fitted: FitResult,
                 level: float = 0.05) -> KsResult:
    """Supremum distance between the sample and the fitted payment cdf."""
    if sample.n == 0:
        raise DomainError("cannot compute a KS statistic on an empty sample")
    # the distribution depends on w0 only through the thresholds, which the
    # sample already carries; rebuild the evaluator on the sample's scale
    model = GroundUpLognormal(w0=0.0, theta=fitted.theta_hat,
                              sigma=fitted.sigma_hat)
    dist = PaymentDistribution(model, sample.policy, sample.kind,
                               thresholds=sample.thresholds)

    values = np.unique(sample.values)
    eval_points = [values]
    if math.isfinite(sample.censoring_point):
        eval_points.append(np.array([sample.censoring_point]))
    if sample.kind is PaymentKind.PER_LOSS:
        eval_points.append(np.array([0.0]))
    grid = np.unique(np.concatenate(eval_points))

    fitted_right = dist.cdf(grid)
    fitted_left = _cdf_left_limits(dist, grid, sample.kind)
    emp_right = np.searchsorted(sample.values, grid, side="right") / sample.n
    emp_left = np.searchsorted(sample.values, grid, side="left") / sample.n

    d = float(np.max(np.maximum(np.abs(emp_right - fitted_right),
                                np.abs(emp_left - fitted_left))))
    crit = ks_critical_value(sample.n, level)
    return KsResult(statistic=d, critical_value=crit,
                    decision=int(d > crit), level=level)


def _cdf_left_limits(dist, grid: np.ndarray, kind: PaymentKind) -> np.ndarray:
    """Left limits of the fitted cdf: drop the atom masses at atom points."""
    left = dist.cdf(grid)
    cr = dist.censoring_point
    if math.isfinite(cr):
        at_censor = grid == cr
        left = np.where(at_censor, left - dist.censor_mass, left)
    if kind is PaymentKind.PER_LOSS:
        left = np.where(grid == 0.0, 0.0, left)
    return left
