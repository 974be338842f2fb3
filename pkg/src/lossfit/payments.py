"""Ground-up lognormal model and its policy-modified payment variables.

A ground-up loss ``W`` is lognormal with known location shift ``w0``:
``X = log(W - w0)`` is normal with mean ``theta`` and standard deviation
``sigma``.  A contract with deductible ``d``, policy limit ``u``, and
coinsurance factor ``c`` turns a loss into a payment; on the normal scale
the deductible and limit become ``t = log(d - w0)`` and ``T = log(u - w0)``.

Two observation schemes are supported:

* per-payment: only losses above the deductible generate records, so the
  payment variable is left-truncated and right-censored;
* per-loss: every policy generates a record, zero when the loss is below
  the deductible, so the payment variable is interval-censored.

Both payment variables live on ``[0, c(T - t)]`` after the log transform,
with probability atoms at the censoring point (and, per-loss, at zero).
Atom probabilities are reported as masses, not densities.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateBandError, DomainError
from .numerics import std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf

__all__ = [
    "PaymentKind",
    "GroundUpLognormal",
    "PolicySpec",
    "NormalThresholds",
    "StandardizedThresholds",
    "PaymentSample",
    "derive_thresholds",
    "standardize",
    "transform_to_normal",
    "dist_y",
    "dist_z",
    "PaymentDistribution",
]

#: Relative tolerance for classifying a value as lying on the censoring point.
CENSOR_TIE_RTOL = 1e-9


class PaymentKind(enum.Enum):
    """Observation scheme for payment records."""

    PER_PAYMENT = "per-payment"
    PER_LOSS = "per-loss"


@dataclass(frozen=True)
class GroundUpLognormal:
    """Lognormal ground-up loss model; ``log(W - w0) ~ N(theta, sigma^2)``."""

    w0: float
    theta: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.w0):
            raise DomainError("w0 must be finite")
        if not (self.sigma > 0):
            raise DomainError("sigma must be strictly positive")


@dataclass(frozen=True)
class PolicySpec:
    """Contract modifications: coinsurance ``c``, deductible ``d``, limit ``u``."""

    c: float = 1.0
    d: float = 0.0
    u: float = math.inf

    def __post_init__(self):
        if not (0.0 < self.c <= 1.0):
            raise DomainError("coinsurance factor must lie in (0, 1]")
        if not (self.d < self.u):
            raise DomainError("deductible must be below the policy limit")


@dataclass(frozen=True)
class NormalThresholds:
    """Deductible and limit mapped to the normal scale.

    ``t = log(d - w0)`` may well be negative; ``T`` is infinite when the
    contract has no policy limit, in which case ``R = T - t`` is too.
    """

    t: float
    T: float
    R: float

    def __post_init__(self):
        if not self.t < self.T:
            raise DomainError("normal-scale thresholds must satisfy t < T")
        expected_r = self.T - self.t
        if math.isfinite(self.T) and abs(self.R - expected_r) > 1e-9 * max(1.0, abs(expected_r)):
            raise DomainError("R must equal T - t")

    @property
    def unlimited(self) -> bool:
        return math.isinf(self.T)


@dataclass(frozen=True)
class StandardizedThresholds:
    """Thresholds standardized by the model: ``gamma = (t - theta)/sigma`` etc.

    ``omega1`` and ``omega2`` are the normal density at ``gamma`` and ``xi``
    divided by the probability of the observable band
    ``sf(gamma) - sf(xi)``; ``omega2`` vanishes for unlimited contracts.
    """

    gamma: float
    xi: float
    omega1: float
    omega2: float


@dataclass(frozen=True)
class PaymentSample:
    """Classified payment observations on the normal scale.

    ``values`` is sorted ascending and contains every record: ``n0`` zeros
    (per-loss only), ``n1`` interior values in ``(0, cR)``, and ``n2``
    values equal to the censoring point ``cR``.
    """

    kind: PaymentKind
    values: np.ndarray
    n0: int
    n1: int
    n2: int
    policy: PolicySpec
    thresholds: NormalThresholds

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.kind is PaymentKind.PER_PAYMENT and self.n0 != 0:
            raise DomainError("per-payment samples cannot contain zero payments")
        if self.n0 + self.n1 + self.n2 != values.size:
            raise DomainError("classification counts do not add up to the sample size")
        cr = self.censoring_point
        tol = CENSOR_TIE_RTOL * max(1.0, cr if math.isfinite(cr) else 1.0)
        n0 = int(np.sum(values == 0.0))
        n2 = int(np.sum(np.abs(values - cr) <= tol)) if math.isfinite(cr) else 0
        if (n0, n2) != (self.n0, self.n2):
            raise DomainError("counts do not match the classification of the values")
        if values.size and (values[0] < 0.0 or (math.isfinite(cr) and values[-1] > cr + tol)):
            raise DomainError("values must lie within [0, cR]")

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def censoring_point(self) -> float:
        """Upper end of the payment support, ``c * R``."""
        return self.policy.c * self.thresholds.R

    @property
    def interior_values(self) -> np.ndarray:
        """The uncensored positive payments, ascending."""
        return self.values[self.n0:self.n - self.n2]


def derive_thresholds(policy: PolicySpec, w0: float) -> NormalThresholds:
    """Map the contract's deductible and limit to the normal scale."""
    if not policy.d > w0:
        raise DomainError("deductible must exceed the location shift w0")
    t = math.log(policy.d - w0)
    T = math.log(policy.u - w0) if math.isfinite(policy.u) else math.inf
    return NormalThresholds(t=t, T=T, R=T - t)


def standardize(model: GroundUpLognormal, th: NormalThresholds) -> StandardizedThresholds:
    """Standardize thresholds by the model and attach the band ratios."""
    gamma = (th.t - model.theta) / model.sigma
    xi = (th.T - model.theta) / model.sigma if math.isfinite(th.T) else math.inf
    sf_gamma = std_normal_sf(gamma)
    sf_xi = std_normal_sf(xi) if math.isfinite(xi) else 0.0
    band = sf_gamma - sf_xi
    if band <= 0.0 or band <= 1e-15 * sf_gamma:
        raise DegenerateBandError(
            "the probability band between deductible and limit vanishes")
    omega1 = std_normal_pdf(gamma) / band
    omega2 = std_normal_pdf(xi) / band if math.isfinite(xi) else 0.0
    return StandardizedThresholds(gamma=gamma, xi=xi, omega1=omega1, omega2=omega2)


def transform_to_normal(raw, kind: PaymentKind, policy: PolicySpec,
                        w0: float) -> PaymentSample:
    """Map currency payments to the normal scale and classify them.

    Each payment ``p`` becomes ``c * log(p / (c (d - w0)) + 1)``; zeros stay
    zero (per-loss), values at the maximum payment ``c (u - d)`` map to the
    censoring point ``cR``.  Ties at the boundaries are resolved within a
    relative tolerance of ``1e-9``.

    Raises
    ------
    DataError
        If a payment is negative, exceeds the maximum payment, or (for
        per-payment data) equals zero.  The record index is attached.
    """
    th = derive_thresholds(policy, w0)
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 1:
        raise DataError("payments must form a one-dimensional sequence")
    c = policy.c
    max_payment = c * (policy.u - policy.d) if math.isfinite(policy.u) else math.inf
    cr = c * th.R

    bad = np.where(~np.isfinite(raw) | (raw < 0.0))[0]
    if bad.size:
        raise DataError(f"payment {float(raw[bad[0]]):g} at record {bad[0]} "
                        "is negative or not finite", index=int(bad[0]))
    if math.isfinite(max_payment):
        tol = CENSOR_TIE_RTOL * max(1.0, max_payment)
        over = np.where(raw > max_payment + tol)[0]
        if over.size:
            raise DataError(
                f"payment {float(raw[over[0]]):g} at record {over[0]} exceeds "
                f"the maximum covered payment {max_payment:g}",
                index=int(over[0]))
    zero = raw == 0.0
    if kind is PaymentKind.PER_PAYMENT and np.any(zero):
        idx = int(np.where(zero)[0][0])
        raise DataError(f"zero payment at record {idx} is not a per-payment observation",
                        index=idx)

    values = c * np.log1p(raw / (c * (policy.d - w0)))
    if math.isfinite(cr):
        tol_v = CENSOR_TIE_RTOL * max(1.0, cr)
        censored = np.abs(values - cr) <= tol_v
        values = np.where(censored, cr, values)
        n2 = int(np.sum(censored))
    else:
        n2 = 0
    values = np.where(zero, 0.0, values)
    n0 = int(np.sum(zero))
    n1 = values.size - n0 - n2
    return PaymentSample(kind=kind, values=np.sort(values), n0=n0, n1=n1, n2=n2,
                         policy=policy, thresholds=th)


class PaymentDistribution:
    """Distribution of a payment variable on the normal scale.

    Evaluators are vectorized over their argument.  ``pdf`` returns the
    density on the continuous part of the support and the probability
    mass at the atoms (the censoring point, plus zero for per-loss data).
    """

    def __init__(self, model: GroundUpLognormal, policy: PolicySpec,
                 kind: PaymentKind, thresholds: NormalThresholds | None = None):
        self.model = model
        self.policy = policy
        self.kind = kind
        self.thresholds = thresholds if thresholds is not None \
            else derive_thresholds(policy, model.w0)
        self.std = standardize(model, self.thresholds)
        self._c = policy.c
        self._cr = policy.c * self.thresholds.R
        self._p_t = std_normal_cdf(self.std.gamma)
        self._p_T = 1.0 - std_normal_sf(self.std.xi) if math.isfinite(self.std.xi) else 1.0

    @property
    def censoring_point(self) -> float:
        return self._cr

    @property
    def censor_mass(self) -> float:
        """Probability of a payment at the censoring point."""
        if self.kind is PaymentKind.PER_PAYMENT:
            return (1.0 - self._p_T) / (1.0 - self._p_t)
        return 1.0 - self._p_T

    @property
    def s_star(self) -> float:
        """Probability that a per-payment record is uncensored or zero-bounded.

        This is the cdf level at which the quantile function reaches the
        censoring point; per-loss data use ``cdf(t)``/``cdf(T)`` directly.
        """
        if self.kind is PaymentKind.PER_PAYMENT:
            return (self._p_T - self._p_t) / (1.0 - self._p_t)
        return self._p_T

    def _x(self, v):
        """Standardized normal argument of a payment value."""
        return (v / self._c + self.thresholds.t - self.model.theta) / self.model.sigma

    def cdf(self, v):
        v = np.asarray(v, dtype=float)
        inner = std_normal_cdf(self._x(np.where(v > 0, v, 1.0)))
        if self.kind is PaymentKind.PER_PAYMENT:
            mid = (inner - self._p_t) / (1.0 - self._p_t)
            out = np.where(v <= 0.0, 0.0, mid)
        else:
            out = np.where(v < 0.0, 0.0, np.where(v == 0.0, self._p_t, inner))
        out = np.where(v >= self._cr, 1.0, out)
        return float(out) if out.ndim == 0 else out

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        dens = std_normal_pdf(self._x(v)) / (self._c * self.model.sigma)
        if self.kind is PaymentKind.PER_PAYMENT:
            dens = dens / (1.0 - self._p_t)
        out = np.where((v > 0.0) & (v < self._cr), dens, 0.0)
        if math.isfinite(self._cr):
            out = np.where(v == self._cr, self.censor_mass, out)
        if self.kind is PaymentKind.PER_LOSS:
            out = np.where(v == 0.0, self._p_t, out)
        return float(out) if out.ndim == 0 else out

    def qf(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise DomainError("quantile argument must lie in [0, 1]")
        if self.kind is PaymentKind.PER_PAYMENT:
            arg = p + (1.0 - p) * self._p_t
            on_branch = p < self.s_star
        else:
            arg = p
            on_branch = (p > self._p_t) & (p < self._p_T)
        safe = np.clip(np.where(on_branch, arg, 0.5), 1e-320, 1.0 - 1e-16)
        branch = self._c * (self.model.theta
                            + self.model.sigma * std_normal_quantile(safe)
                            - self.thresholds.t)
        if self.kind is PaymentKind.PER_PAYMENT:
            out = np.where(on_branch, branch, self._cr)
            out = np.where(p == 0.0, 0.0, out)
        else:
            out = np.where(on_branch, branch, np.where(p <= self._p_t, 0.0, self._cr))
        return float(out) if out.ndim == 0 else out


def dist_y(model: GroundUpLognormal, policy: PolicySpec) -> PaymentDistribution:
    """Distribution of the per-payment variable (left-truncated, censored)."""
    return PaymentDistribution(model, policy, PaymentKind.PER_PAYMENT)


def dist_z(model: GroundUpLognormal, policy: PolicySpec) -> PaymentDistribution:
    """Distribution of the per-loss variable (interval-censored)."""
    return PaymentDistribution(model, policy, PaymentKind.PER_LOSS)
