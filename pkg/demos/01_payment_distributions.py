"""Payment variables of a lognormal loss under a deductible and a limit.

A ground-up loss W with log(W - w0) ~ N(theta, sigma^2) is modified by a
contract (coinsurance c, deductible d, limit u).  Per-payment data record
only losses above the deductible; per-loss data record a zero for every
loss below it.  On the normal scale both live on [0, c(T - t)] with
probability atoms at the edges.
"""
import numpy as np

import lossfit as lf
from lossfit.payments import PaymentKind

model = lf.GroundUpLognormal(w0=1.0, theta=5.0, sigma=3.0)
policy = lf.PolicySpec(c=1.0, d=4.0, u=2e5)

th = lf.derive_thresholds(policy, model.w0)
std = lf.standardize(model, th)
print("normal-scale thresholds:")
print(f"  t = log(d - w0) = {th.t:.4f}")
print(f"  T = log(u - w0) = {th.T:.4f}")
print(f"  R = T - t       = {th.R:.4f}")
print(f"standardized: gamma = {std.gamma:.4f}, xi = {std.xi:.4f}")
print(f"share of losses below the deductible: {lf.std_normal_cdf(std.gamma):.4f}")
print(f"share of losses above the limit:      {lf.std_normal_sf(std.xi):.4f}")

print("\nper-payment variable (left-truncated, right-censored):")
y = lf.dist_y(model, policy)
print(f"  support (0, {y.censoring_point:.4f}]")
print(f"  censoring atom mass: {y.censor_mass:.4f}")
print(f"  cdf reaches the atom at s* = {y.s_star:.4f}")

print("\nper-loss variable (interval-censored):")
z = lf.dist_z(model, policy)
print(f"  atom at zero: {z.pdf(0.0):.4f}  (equals cdf(deductible))")
print(f"  atom at the censoring point: {z.pdf(z.censoring_point):.4f}")
total = z.pdf(0.0) + (1 - z.pdf(0.0) - z.pdf(z.censoring_point)) \
    + z.pdf(z.censoring_point)
print(f"  total mass: {total:.6f}")

print("\nquantile/cdf round trip on the continuous branch:")
v = np.linspace(0.05, 0.90, 6)
back = y.cdf(y.qf(v))
for vi, bi in zip(v, back):
    print(f"  v = {vi:.2f} -> qf -> cdf -> {bi:.10f}")

print("\ncurrency payments map to the normal scale via c*log(p/(c(d-w0)) + 1):")
raw = np.array([0.0, 10.0, 1000.0, policy.c * (policy.u - policy.d)])
sample = lf.transform_to_normal(raw, PaymentKind.PER_LOSS, policy, model.w0)
for p, vn in zip(raw, sample.values):
    print(f"  payment {p:>12.2f} -> {vn:.4f}")
print(f"classified: n0 = {sample.n0}, n1 = {sample.n1}, n2 = {sample.n2}")
