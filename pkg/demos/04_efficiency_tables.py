"""Asymptotic efficiency of trimmed-moment estimators relative to the MLE.

The efficiency of a trimming choice (a, b) is the square root of the
covariance-determinant ratio with the MLE in the numerator, so one means
"as good as the MLE" and smaller means a price paid for robustness.
Heavier upper trimming costs more when the censoring point sits lower.
"""
import sys

import lossfit as lf
from lossfit.efficiency import AreRequest, are_table
from lossfit.payments import PaymentKind

model = lf.GroundUpLognormal(w0=1.0, theta=5.0, sigma=3.0)

for u in (2e5, 2.4e4):
    policy = lf.PolicySpec(c=1.0, d=4.0, u=u)
    print(f"\nper-payment variable, censoring point u = {u:g}:")
    req = AreRequest.from_axes(model, policy, PaymentKind.PER_PAYMENT,
                               a_values=[0.0, 0.10, 0.25],
                               b_values=[0.05, 0.10, 0.25])
    are_table(req).to_csv(sys.stdout)

policy = lf.PolicySpec(c=1.0, d=4.0, u=2e5)
print(f"\nper-loss variable, censoring point u = {policy.u:g}:")
req = AreRequest.from_axes(model, policy, PaymentKind.PER_LOSS,
                           a_values=[0.10, 0.25, 0.49],
                           b_values=[0.05, 0.10, 0.25])
are_table(req).to_csv(sys.stdout)

print("\nsingle pairs via the covariance functions directly:")
th = lf.derive_thresholds(policy, model.w0)
std = lf.standardize(model, th)
s_mle = lf.cov_mle_y(std.gamma, model.sigma, th)
for a, b in ((0.0, 0.01), (0.0, 0.25), (0.25, 0.25)):
    s_mtm = lf.cov_mtm_y(model.theta, model.sigma, th, lf.TrimSpec(a, b))
    print(f"  trim ({a}, {b}): efficiency {lf.are_pair(s_mle, s_mtm):.3f}")
