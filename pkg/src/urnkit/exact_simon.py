"""Closed-form results for the constant-trigger, identity-weight urn.

When p_n = p is constant and F(x) = x, the law of the color count and
the expected occupation of each color admit exact expressions built from
binomial coefficients and Gamma-function ratios. Everything here is
evaluated in log-gamma domain and exponentiated once at the end, so the
formulas stay finite for horizons up to 1e7 and beyond.

``dynamic_mean_color1`` additionally covers time-varying triggers: the
expected count of the first color solves a one-line recursion whose
solution is a product over the schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .distributions import ExactDistribution
from .errors import ValidationError
from .urn_core import TriggerSchedule


def _check_p(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValidationError("p must lie strictly inside (0, 1)")
    return float(p)


def _log_binom(n, k):
    """log C(n, k) elementwise; -inf outside the triangle."""
    n = np.asarray(n, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    out = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    bad = (k < 0) | (k > n)
    if np.ndim(out) == 0:
        return -np.inf if bad else float(out)
    out = np.where(bad, -np.inf, out)
    return out


def colors_pmf(n: int, p: float) -> ExactDistribution:
    """Exact law of the number of distinct colors after n steps.

    P(C_n = i) = C(n-1, i-1) p^(i-1) (1-p)^(n-i) on i = 1..n: the first
    step always starts a color, the remaining n-1 triggers are iid, so
    C_n - 1 is binomial. Delegated to scipy's saddle-point pmf, which
    keeps the total mass within a few ulp of 1 even at n = 1e4 (a plain
    exp-of-log-gamma evaluation drifts to ~4e-12 there).
    """
    p = _check_p(p)
    if n < 1:
        raise ValidationError("n must be at least 1")
    return ExactDistribution(1, stats.binom.pmf(np.arange(n), n - 1, p))


def colors_moments(n: int, p: float) -> tuple[float, float]:
    """Mean and variance of the color count: 1 + p(n-1), p(1-p)(n-1)."""
    p = _check_p(p)
    if n < 1:
        raise ValidationError("n must be at least 1")
    return 1.0 + p * (n - 1), p * (1.0 - p) * (n - 1)


def prob_color_absent(n: int, c: int, p: float) -> float:
    """Probability that color c never appears in the first n steps.

    Color c exists only once c-1 earlier colors do, so absence means the
    trigger count stayed below c; split on whether the (c-1)-th trigger
    happened at the last step or never:

        C(n-2, c-2) p^(c-2) (1-p)^(n-c+1)
        + sum_{r=1}^{c-2} C(n-2, r-1) p^(r-1) (1-p)^(n-r-1)

    with the empty-sum and out-of-triangle binomials equal to zero.
    """
    p = _check_p(p)
    if n < 2 or c < 2:
        raise ValidationError("requires n >= 2 and c >= 2")
    lb = _log_binom(n - 2, c - 2)
    first = 0.0 if lb == -np.inf else math.exp(
        lb + (c - 2) * math.log(p) + (n - c + 1) * math.log1p(-p))
    if c > 2:
        r = np.arange(1, c - 1, dtype=np.float64)
        logterms = (_log_binom(n - 2.0, r - 1.0)
                    + (r - 1.0) * math.log(p)
                    + (n - r - 1.0) * math.log1p(-p))
        rest = float(np.sum(np.exp(logterms)))
    else:
        rest = 0.0
    return first + rest


@dataclass(frozen=True)
class SeriesValue:
    """A partial or limiting series value.

    ``tail_bound`` is a certified bound on the truncation remainder when
    the series was summed to its limit, and None for plain partial sums
    (those are exact as far as they go).
    """

    value: float
    tail_bound: float | None
    terms: int


def _log_series_term(i, c: int, p: float):
    """log of term i: C(i-2, c-2) (1-p)^i Gamma(i)/Gamma(i+1-p)."""
    i = np.asarray(i, dtype=np.float64)
    return (_log_binom(i - 2.0, float(c - 2))
            + i * math.log1p(-p)
            + gammaln(i) - gammaln(i + 1.0 - p))


def lambda_series(c: int, p: float, *, upto: int | None = None,
                  tolerance: float | None = None) -> SeriesValue:
    """The series sum_{i=c+1} C(i-2, c-2) (1-p)^i Gamma(i)/Gamma(i+1-p).

    Exactly one of ``upto`` (partial sum through i = upto) and
    ``tolerance`` (sum until a certified geometric tail bound drops
    below it) must be given. Terms decay like (1-p)^i i^(p-1), so the
    limit always exists for p inside (0, 1).
    """
    p = _check_p(p)
    if c < 2:
        raise ValidationError("requires c >= 2")
    if (upto is None) == (tolerance is None):
        raise ValidationError("give exactly one of upto= or tolerance=")

    if upto is not None:
        if upto < c:
            raise ValidationError("partial sum endpoint must be >= c")
        if upto == c:
            return SeriesValue(0.0, None, 0)
        i = np.arange(c + 1, upto + 1, dtype=np.float64)
        value = float(np.sum(np.exp(_log_series_term(i, c, p))))
        return SeriesValue(value, None, upto - c)

    if not tolerance > 0.0:
        raise ValidationError("tolerance must be positive")
    total = 0.0
    i = c + 1
    terms = 0
    while True:
        t = math.exp(_log_series_term(i, c, p))
        total += t
        terms += 1
        # The term ratio f(j) = t_{j+1}/t_j factors as
        # (j-1)/(j-c+1) * j/(j+1-p) * (1-p); the first factor decreases
        # toward 1 and the second stays below 1, so every ratio past i
        # is at most r_b below, giving a geometric tail certificate.
        r_b = (1.0 - p) * i / (i - c + 2.0)
        if r_b < 1.0:
            tail = t * r_b / (1.0 - r_b)
            if tail < tolerance and t < 1e-15 * total:
                return SeriesValue(total, tail, terms)
        i += 1
        if terms > 10_000_000:
            raise RuntimeError("series failed to converge; cannot happen "
                               "for p inside (0, 1)")


def expected_count(n: int, c: int, p: float) -> float:
    """Expected number of observations of color c after n steps.

    For n = c (the earliest time the color can exist) this is p^(c-1);
    beyond that the closed form combines the partial series with a
    Gamma-ratio prefactor:

        Gamma(n+1-p)/Gamma(n) * [ p^(c-1)/(1-p)^c * Lambda_n
                                  + p^(c-1) Gamma(c)/Gamma(c+1-p) ]
    """
    p = _check_p(p)
    if c < 1:
        raise ValidationError("colors are labeled from 1")
    if n < c:
        raise ValidationError(f"color {c} cannot exist before time {c}")
    if n == c:
        return p ** (c - 1)
    if c == 1:
        return expected_count_color1(n, p).exact
    lam = lambda_series(c, p, upto=n).value
    log_prefactor = gammaln(n + 1.0 - p) - gammaln(float(n))
    series_part = math.exp(
        log_prefactor + (c - 1) * math.log(p) - c * math.log1p(-p)) * lam
    gamma_part = math.exp(
        log_prefactor + (c - 1) * math.log(p)
        + gammaln(float(c)) - gammaln(c + 1.0 - p))
    return series_part + gamma_part


@dataclass(frozen=True)
class Color1Expectation:
    """Exact and asymptotic expectations of the first color's count.

    ``abs_error`` is the actual gap between the two; it shrinks like
    n^(-p) in absolute terms (the ratio tends to 1 like 1/n).
    """

    exact: float
    asymptotic: float
    abs_error: float


def expected_count_color1(n: int, p: float) -> Color1Expectation:
    """E[K_{n,1}] = Gamma(n+1-p) / (Gamma(2-p) Gamma(n)) ~ n^(1-p)/Gamma(2-p)."""
    p = _check_p(p)
    if n < 1:
        raise ValidationError("n must be at least 1")
    exact = math.exp(gammaln(n + 1.0 - p) - gammaln(2.0 - p) - gammaln(float(n)))
    asymptotic = math.exp((1.0 - p) * math.log(n) - gammaln(2.0 - p))
    return Color1Expectation(exact, asymptotic, abs(exact - asymptotic))


def asymptotic_prefactor(c: int, p: float) -> float:
    """Limit of E[K_{n,c}] / n^(1-p): the constant in front of the
    power-law growth of color c's expected count.

        p^(c-1) * ( Lambda_inf(c,p)/(1-p)^c + Gamma(c)/Gamma(c+1-p) )
    """
    p = _check_p(p)
    if c < 2:
        raise ValidationError("requires c >= 2 (color 1 has its own form)")
    lam = lambda_series(c, p, tolerance=1e-12).value
    series_part = math.exp((c - 1) * math.log(p) - c * math.log1p(-p)) * lam
    gamma_part = math.exp((c - 1) * math.log(p)
                          + gammaln(float(c)) - gammaln(c + 1.0 - p))
    return series_part + gamma_part


_DYNAMIC_CHUNK = 1 << 20


def dynamic_mean_color1(schedule: TriggerSchedule, n: int) -> float:
    """E[K_{n,1}] under an arbitrary trigger schedule.

    The expectation satisfies E_i = E_{i-1} * (i - p_i)/(i - 1) with
    E_1 = 1, giving the product over i = 2..n. Accumulated as a
    compensated sum of logs, so million-step products keep better than
    1e-12 relative accuracy.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if n == 1:
        return 1.0
    partials: list[float] = []
    for lo in range(2, n + 1, _DYNAMIC_CHUNK):
        hi = min(lo + _DYNAMIC_CHUNK, n + 1)
        ps = schedule.prob_slice(lo, hi)
        i = np.arange(lo, hi, dtype=np.float64)
        partials.append(math.fsum(np.log((i - ps) / (i - 1.0))))
    return math.exp(math.fsum(partials))
