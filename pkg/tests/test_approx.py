"""Poisson-binomial convolution, Poisson bound, and normal standardization."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from urnkit import (
    Constant,
    ExactDistribution,
    Explicit,
    Geometric,
    Harmonic,
    PoissonLaw,
    PowerLaw,
    ValidationError,
    barbour_holst,
    clt_report,
    colors_pmf,
    poisson_binomial_pmf,
    total_variation,
)


# ---------------------------------------------------------------------------
# Exact convolution


def test_dp_matches_constant_p_closed_form():
    n, p = 100, 0.3
    dp = poisson_binomial_pmf(Constant(p), n)
    closed = colors_pmf(n, p)
    for c in range(1, n + 1):
        assert dp.pmf(c) == pytest.approx(closed.pmf(c), abs=1e-12)
    assert dp.pmf(0) == 0.0


def test_dp_harmonic_three_steps_by_hand():
    # triggers fire with probabilities 1, clamp, 1/2
    dp = poisson_binomial_pmf(Harmonic(), 3)
    clamp = 1.0 - 1e-6
    assert dp.pmf(0) == 0.0
    assert dp.pmf(1) == pytest.approx((1 - clamp) * 0.5, abs=1e-18)
    assert dp.pmf(2) == pytest.approx(0.5, abs=1e-12)
    assert dp.pmf(3) == pytest.approx(clamp * 0.5, abs=1e-12)


def test_dp_single_step():
    dp = poisson_binomial_pmf(Constant(0.7), 1)
    assert dp.pmf(0) == 0.0
    assert dp.pmf(1) == 1.0


def test_dp_moments_match_moment_sums():
    schedule = PowerLaw(0.6)
    n = 500
    dp = poisson_binomial_pmf(schedule, n)
    report = barbour_holst(schedule, n)
    assert dp.mean() == pytest.approx(report.lambda1, rel=1e-12)
    assert dp.variance() == pytest.approx(report.clt_sd ** 2, rel=1e-10)


def test_dp_refusals():
    with pytest.raises(ValidationError):
        poisson_binomial_pmf(Constant(0.5), 100_001)
    with pytest.raises(ValidationError):
        poisson_binomial_pmf(Constant(0.5), 0)


# ---------------------------------------------------------------------------
# Moment sums and the Poisson bound


def test_constant_p_moment_sums_are_exact():
    n, p = 1000, 0.25
    report = barbour_holst(Constant(p), n)
    assert report.lambda1 == pytest.approx(1 + (n - 1) * p, rel=1e-13)
    assert report.lambda2 == pytest.approx(1 + (n - 1) * p * p, rel=1e-13)
    want = (1 - math.exp(-report.lambda1)) * report.lambda2 / report.lambda1
    assert report.tv_bound == want
    assert report.clt_mean == report.lambda1
    assert report.clt_sd == pytest.approx(
        math.sqrt((n - 1) * p * (1 - p)), rel=1e-12)


def test_moment_sums_refuse_empty_horizon():
    with pytest.raises(ValidationError):
        barbour_holst(Constant(0.5), 0)


def test_report_to_dict_is_complete():
    report = barbour_holst(Constant(0.5), 10)
    doc = report.to_dict()
    assert doc["n"] == 10
    assert doc["lambda1"] == report.lambda1
    assert doc["tv_exact"] is None


# ---------------------------------------------------------------------------
# Total variation


def test_tv_identical_is_zero():
    d = ExactDistribution(0, np.array([0.25, 0.75]))
    tv = total_variation(d, d)
    assert tv.value == 0.0
    assert tv.uncertainty == 0.0


def test_tv_hand_example():
    d1 = ExactDistribution(0, np.array([0.5, 0.5]))
    d2 = ExactDistribution(0, np.array([0.3, 0.7]))
    assert total_variation(d1, d2).value == pytest.approx(0.2, abs=1e-15)


def test_tv_disjoint_supports():
    d1 = ExactDistribution.point_mass(0)
    d2 = ExactDistribution.point_mass(5)
    assert total_variation(d1, d2).value == pytest.approx(1.0, abs=1e-15)


def test_tv_poisson_truncation_is_reported():
    tv = total_variation(PoissonLaw(5.0), PoissonLaw(5.0))
    assert tv.value == 0.0
    assert 0.0 <= tv.uncertainty <= 1e-13


masses = st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6)


@given(masses, masses, masses)
def test_tv_is_a_metric(a, b, c):
    dists = [ExactDistribution(0, np.array(m) / sum(m)) for m in (a, b, c)]
    da, db, dc = dists
    ab = total_variation(da, db).value
    ba = total_variation(db, da).value
    assert ab == ba
    assert 0.0 <= ab <= 1.0
    ac = total_variation(da, dc).value
    bc = total_variation(db, dc).value
    assert ac <= ab + bc + 1e-12


SCHEDULES = [
    (Constant(0.05), 400),
    (Constant(0.5), 200),
    (PowerLaw(0.4), 500),
    (Harmonic(scale=2.0), 300),
    (Geometric(0.99), 300),
    (Explicit(tuple((i % 7 + 1) / 10 for i in range(499))), 500),
]


@pytest.mark.parametrize("schedule,n", SCHEDULES)
def test_poisson_distance_stays_under_bound(schedule, n):
    report = barbour_holst(schedule, n)
    dp = poisson_binomial_pmf(schedule, n)
    tv = total_variation(dp, PoissonLaw(report.lambda1))
    assert tv.value + tv.uncertainty <= report.tv_bound


# ---------------------------------------------------------------------------
# Normal approximation


def test_clt_standardizes_binomial_samples():
    n, p = 10_000, 0.5
    rng = np.random.default_rng(42)
    samples = rng.binomial(n - 1, p, size=2000) + 1
    report = clt_report(Constant(p), n, samples)
    assert report.mean == pytest.approx(1 + (n - 1) * p, rel=1e-12)
    assert report.sum_var == pytest.approx((n - 1) * p * (1 - p), rel=1e-12)
    assert report.standardized.shape == (2000,)
    assert abs(report.standardized.mean()) < 0.1
    assert report.ks_statistic < 1.36 / math.sqrt(2000) * 1.5


def test_clt_detects_wrong_scale():
    rng = np.random.default_rng(7)
    samples = rng.normal(0.0, 1.0, size=500)  # nowhere near the urn mean
    report = clt_report(Constant(0.5), 1000, samples)
    assert report.ks_statistic > 0.5


def test_clt_rejects_degenerate_schedules():
    with pytest.raises(ValidationError):
        clt_report(Explicit((1.0, 1.0, 1.0)), 4, [4.0, 4.0])
    with pytest.raises(ValidationError):
        clt_report(Constant(0.5), 10, [])
