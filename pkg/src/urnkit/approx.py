"""Distributional approximations for the color count.

The number of distinct colors after n steps is a sum of independent,
non-identical Bernoulli triggers, so three reference objects matter: the
exact Poisson-binomial law (a dynamic-programming convolution), the
Poisson law with matched mean together with the total-variation bound
    (1 - e^(-lambda1)) * lambda2 / lambda1
with lambda1 = sum p_i and lambda2 = sum p_i^2, and the normal
approximation obtained by standardizing with mean sum p_i and variance
sum p_i (1 - p_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import ndtr

from .distributions import ExactDistribution, PoissonLaw
from .errors import ValidationError
from .urn_core import TriggerSchedule

DP_LIMIT = 100_000
_SUM_CHUNK = 1 << 20


def poisson_binomial_pmf(schedule: TriggerSchedule, n: int) -> ExactDistribution:
    """Exact law of the trigger count after n steps (O(n^2) convolution).

    Support is {0..n}, though 0 carries no mass because the first step
    always triggers. Horizons beyond DP_LIMIT are refused; use the
    Poisson or normal route there.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if n > DP_LIMIT:
        raise ValidationError(
            f"quadratic convolution refused beyond n={DP_LIMIT}; "
            "use the Poisson/normal approximations instead")
    ps = schedule.prob_slice(0, n)
    probs = np.zeros(n + 1)
    probs[0] = 1.0
    hi = 0
    for i in range(n):
        p = ps[i]
        # the right-hand side is materialized before assignment, so the
        # overlapping slices are safe
        probs[1: hi + 2] = probs[1: hi + 2] * (1.0 - p) + probs[: hi + 1] * p
        probs[0] *= 1.0 - p
        hi += 1
    return ExactDistribution(0, probs)


@dataclass(frozen=True)
class ApproxReport:
    """Summary of the Poisson and normal approximations at horizon n."""

    n: int
    lambda1: float
    lambda2: float
    tv_bound: float
    clt_mean: float
    clt_sd: float
    tv_exact: float | None = None
    tv_uncertainty: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "tv_bound": self.tv_bound,
            "clt_mean": self.clt_mean,
            "clt_sd": self.clt_sd,
            "tv_exact": self.tv_exact,
            "tv_uncertainty": self.tv_uncertainty,
        }


def barbour_holst(schedule: TriggerSchedule, n: int) -> ApproxReport:
    """Moment sums and the total-variation bound against Poisson(lambda1).

    Streams the schedule in chunks, so n = 1e7 takes a fraction of a
    second and bounded memory.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    l1_parts: list[float] = []
    l2_parts: list[float] = []
    var_parts: list[float] = []
    for lo in range(0, n, _SUM_CHUNK):
        hi = min(lo + _SUM_CHUNK, n)
        ps = schedule.prob_slice(lo, hi)
        l1_parts.append(float(np.sum(ps)))
        l2_parts.append(float(np.sum(ps * ps)))
        var_parts.append(float(np.sum(ps * (1.0 - ps))))
    lambda1 = math.fsum(l1_parts)
    lambda2 = math.fsum(l2_parts)
    variance = math.fsum(var_parts)
    bound = (1.0 - math.exp(-lambda1)) * lambda2 / lambda1
    return ApproxReport(
        n=n,
        lambda1=lambda1,
        lambda2=lambda2,
        tv_bound=bound,
        clt_mean=lambda1,
        clt_sd=math.sqrt(variance),
    )


@dataclass(frozen=True)
class TVDistance:
    """Total-variation distance plus the truncation slack of its inputs."""

    value: float
    uncertainty: float


def total_variation(d1: Union[ExactDistribution, PoissonLaw],
                    d2: Union[ExactDistribution, PoissonLaw]) -> TVDistance:
    """(1/2) sum_j |P1(j) - P2(j)| over the nonnegative integers.

    Poisson inputs are truncated where their cdf passes 1 - 1e-14; the
    dropped mass is not ignored but reported as ``uncertainty`` (the
    distance can be off by at most that much).
    """
    slack = 0.0
    if isinstance(d1, PoissonLaw):
        d1, dropped = d1.truncated()
        slack += dropped
    if isinstance(d2, PoissonLaw):
        d2, dropped = d2.truncated()
        slack += dropped
    lo = min(d1.offset, d2.offset)
    hi = max(d1.offset + len(d1.probs), d2.offset + len(d2.probs))
    a = np.zeros(hi - lo)
    b = np.zeros(hi - lo)
    a[d1.offset - lo: d1.offset - lo + len(d1.probs)] = d1.probs
    b[d2.offset - lo: d2.offset - lo + len(d2.probs)] = d2.probs
    value = 0.5 * float(np.abs(a - b).sum())
    return TVDistance(value, 0.5 * slack)


@dataclass(frozen=True)
class CltReport:
    """Standardized color-count samples and their agreement with N(0,1)."""

    mean: float
    sd: float
    sum_var: float
    standardized: np.ndarray
    ks_statistic: float


def clt_report(schedule: TriggerSchedule, n: int,
               samples: Sequence[float]) -> CltReport:
    """Standardize realized color counts and measure normal agreement.

    Each sample x maps to (x - sum p_i) / sqrt(sum p_i (1 - p_i)); the
    one-sample Kolmogorov-Smirnov statistic against the standard normal
    cdf is reported (the statistic only; the caller picks its own gate).
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValidationError("need at least one sample")
    report = barbour_holst(schedule, n)
    var = report.clt_sd ** 2
    if var <= 0.0:
        raise ValidationError(
            "degenerate trigger variance: all p_i are 0 or 1")
    z = (samples - report.clt_mean) / report.clt_sd
    z_sorted = np.sort(z)
    cdf = ndtr(z_sorted)
    m = float(samples.size)
    upper = np.max(np.arange(1, samples.size + 1) / m - cdf)
    lower = np.max(cdf - np.arange(0, samples.size) / m)
    ks = float(max(upper, lower))
    return CltReport(
        mean=report.clt_mean,
        sd=report.clt_sd,
        sum_var=var,
        standardized=z,
        ks_statistic=ks,
    )
