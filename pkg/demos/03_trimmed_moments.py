"""Trimmed-moment estimation and its robustness against edge contamination.

Matching trimmed sample moments against trimmed population moments removes
the probability atoms that truncation and censoring pile up at the edges
of the payment support.  The estimator tolerates contamination near those
edges at a quantifiable efficiency cost; the MLE does not.
"""
import numpy as np

import lossfit as lf
from lossfit.payments import PaymentKind
from lossfit.simulation import generate_sample

model = lf.GroundUpLognormal(w0=1.0, theta=5.0, sigma=3.0)
policy = lf.PolicySpec(c=1.0, d=4.0, u=2e5)
rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(77)))

sample = generate_sample(model, policy, PaymentKind.PER_PAYMENT, 1500, rng)
trim = lf.TrimSpec(0.05, 0.05)

verdict = lf.validate_trim_y(sample, trim)
print(f"window check before fitting: {'pass' if verdict.empirical_passed else 'fail'}"
      f" (uncensored share {verdict.coverage.s_star_empirical:.4f})")

fit = lf.fit_mtm_y(sample, trim)
print(f"implicit fit:  theta = {fit.theta_hat:.3f}, sigma = {fit.sigma_hat:.3f} "
      f"({fit.iterations} passes)")
post = fit.extras["validation"]
print(f"window re-check at the fitted model: "
      f"{'pass' if post.passed else 'fail'} "
      f"(parametric share {post.coverage.s_star_parametric:.4f})")

plugin = lf.fit_mtm_y_plugin(sample, trim)
print(f"one-shot fit:  theta = {plugin.theta_hat:.3f}, "
      f"sigma = {plugin.sigma_hat:.3f} (coefficients frozen at the start)")

mle = lf.fit_mle_y(sample)
print(f"MLE reference: theta = {mle.theta_hat:.3f}, sigma = {mle.sigma_hat:.3f}")

# contaminate: push the top 3% of observations to the censoring point
values = sample.values.copy()
k = int(0.03 * sample.n)
values[-k:] = sample.censoring_point
n2 = int(np.sum(values == sample.censoring_point))
dirty = lf.PaymentSample(kind=sample.kind, values=values, n0=0,
                         n1=sample.n - n2, n2=n2, policy=policy,
                         thresholds=sample.thresholds)
print(f"\ncontaminating {k} records at the censoring point:")
dirty_mtm = lf.fit_mtm_y(dirty, lf.TrimSpec(0.05, 0.05), validate=False)
dirty_mle = lf.fit_mle_y(dirty)
print(f"  MTM moves by  (theta {abs(dirty_mtm.theta_hat - fit.theta_hat):.4f}, "
      f"sigma {abs(dirty_mtm.sigma_hat - fit.sigma_hat):.4f})")
print(f"  MLE moves by  (theta {abs(dirty_mle.theta_hat - mle.theta_hat):.4f}, "
      f"sigma {abs(dirty_mle.sigma_hat - mle.sigma_hat):.4f})")

# per-loss data: once the trimming clears both atoms the fit is closed form
sample_z = generate_sample(model, policy, PaymentKind.PER_LOSS, 1500, rng)
fit_z = lf.fit_mtm_z(sample_z, lf.TrimSpec(0.12, 0.12))
print(f"\nper-loss closed form: theta = {fit_z.theta_hat:.3f}, "
      f"sigma = {fit_z.sigma_hat:.3f}, back-substitution residual "
      f"{fit_z.extras['residual']:.1e}")
