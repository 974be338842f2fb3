"""Shared fixtures: the simulation-design model and synthetic samples."""
from __future__ import annotations

import math
import os
import pathlib

import numpy as np
import pytest

import lossfit as lf
from lossfit.payments import PaymentKind


@pytest.fixture(scope="session")
def design_model() -> lf.GroundUpLognormal:
    """Ground-up model used throughout the efficiency studies."""
    return lf.GroundUpLognormal(w0=1.0, theta=5.0, sigma=3.0)


@pytest.fixture(scope="session")
def policy_u2e5() -> lf.PolicySpec:
    return lf.PolicySpec(c=1.0, d=4.0, u=2e5)


@pytest.fixture(scope="session")
def policy_u24k() -> lf.PolicySpec:
    return lf.PolicySpec(c=1.0, d=4.0, u=2.4e4)


@pytest.fixture(scope="session")
def policy_u85h() -> lf.PolicySpec:
    return lf.PolicySpec(c=1.0, d=4.0, u=8.5e3)


@pytest.fixture(scope="session")
def policy_unlimited() -> lf.PolicySpec:
    return lf.PolicySpec(c=1.0, d=4.0, u=math.inf)


def two_point_interior(n1: int, m1: float, m2: float) -> np.ndarray:
    """n1 values taking two levels with exact first and second moments."""
    k = n1 // 2
    p = k / n1
    q = 1.0 - p
    spread = math.sqrt(m2 - m1 * m1)
    hi = m1 + math.sqrt(q / p) * spread
    lo = m1 - math.sqrt(p / q) * spread
    return np.concatenate([np.full(n1 - k, lo), np.full(k, hi)])


# The maximum-likelihood results for the widely studied 1500 US indemnity
# losses with a 500 deductible and a 100000 limit depend on the data only
# through these sufficient statistics, so synthetic samples carrying them
# reproduce those results exactly.
INDEMNITY_POLICY = lf.PolicySpec(c=1.0, d=500.0, u=1e5)
INDEMNITY_MU1 = 2.9762
INDEMNITY_MU2 = 10.3394
INDEMNITY_COUNTS = {"n0": 49, "n1": 1299, "n2": 152}


@pytest.fixture(scope="session")
def indemnity_moment_sample_y() -> lf.PaymentSample:
    th = lf.derive_thresholds(INDEMNITY_POLICY, 0.0)
    interior = two_point_interior(INDEMNITY_COUNTS["n1"], INDEMNITY_MU1,
                                  INDEMNITY_MU2)
    values = np.concatenate([interior,
                             np.full(INDEMNITY_COUNTS["n2"], th.R)])
    return lf.PaymentSample(kind=PaymentKind.PER_PAYMENT,
                            values=np.sort(values), n0=0,
                            n1=INDEMNITY_COUNTS["n1"],
                            n2=INDEMNITY_COUNTS["n2"],
                            policy=INDEMNITY_POLICY, thresholds=th)


@pytest.fixture(scope="session")
def indemnity_moment_sample_z() -> lf.PaymentSample:
    th = lf.derive_thresholds(INDEMNITY_POLICY, 0.0)
    interior = two_point_interior(INDEMNITY_COUNTS["n1"], INDEMNITY_MU1,
                                  INDEMNITY_MU2)
    values = np.concatenate([np.zeros(INDEMNITY_COUNTS["n0"]), interior,
                             np.full(INDEMNITY_COUNTS["n2"], th.R)])
    return lf.PaymentSample(kind=PaymentKind.PER_LOSS, values=np.sort(values),
                            n0=INDEMNITY_COUNTS["n0"],
                            n1=INDEMNITY_COUNTS["n1"],
                            n2=INDEMNITY_COUNTS["n2"],
                            policy=INDEMNITY_POLICY, thresholds=th)


def indemnity_csv_path() -> pathlib.Path | None:
    """Locate the user-supplied indemnity loss file, if present."""
    candidates = []
    env = os.environ.get("LOSSFIT_INDEMNITY_CSV")
    if env:
        candidates.append(pathlib.Path(env))
    candidates.append(pathlib.Path(__file__).resolve().parent.parent
                      / "data" / "us_indemnity.csv")
    for path in candidates:
        if path.is_file():
            return path
    return None


requires_indemnity_data = pytest.mark.skipif(
    indemnity_csv_path() is None,
    reason="user-supplied indemnity loss dataset not present "
           "(set LOSSFIT_INDEMNITY_CSV or add data/us_indemnity.csv)")
