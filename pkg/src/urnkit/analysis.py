"""Empirical and theoretical analytics over urn runs.

The empirical side works on trajectories: the color-frequency spectrum
Q_k (how many colors were seen exactly k times), the rank curve z(r)
(counts sorted descending), and ordinary least squares on log10-log10
axes for three regressions: (i) colors over time, (ii) single-color
counts over time, (iii) count versus rank. The fitted slopes feed the
parameter estimators theta-hat, p-hat, delta-hat, alpha-hat and
eta-hat = ((1 - p)/delta - 1)/p.

The theoretical side predicts the same exponents from the model
parameters when a prediction exists (constant or power-law triggers with
affine weights), and classifies the qualitative regime: whether the
color set keeps growing, and whether a single color eventually swallows
almost everything (weights summable in 1/F) or every color recurs.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .errors import EstimationError, ValidationError
from .urn_core import (Constant, Explicit, Geometric, Harmonic, Linear,
                       PowerLaw, PowerRoot, Tabulated, Trace, TriggerSchedule,
                       UpdateFunction)

# ---------------------------------------------------------------------------
# Empirical structures


@dataclass(frozen=True)
class FrequencySpectrum:
    """Q_k = number of colors observed exactly k times, with normalization."""

    n: int
    num_colors: int
    entries: dict[int, int]
    normalized: dict[int, float]

    def to_rows(self) -> list[tuple[int, int, float]]:
        return [(k, self.entries[k], self.normalized[k])
                for k in sorted(self.entries)]


def frequency_spectrum(final_counts: Sequence[int]) -> FrequencySpectrum:
    counts = [int(k) for k in final_counts]
    if any(k < 1 for k in counts):
        raise ValidationError("counts must all be at least 1")
    entries = dict(Counter(counts))
    C = len(counts)
    return FrequencySpectrum(
        n=sum(counts),
        num_colors=C,
        entries=entries,
        normalized={k: q / C for k, q in entries.items()},
    )


@dataclass(frozen=True)
class RankCurve:
    """Counts sorted to nonincreasing order; rank 1 is the most frequent.

    Ties are broken by ascending color label, so the first-born of a tie
    gets the better rank (any stable rule works; this one is documented).
    """

    z: tuple[int, ...]

    def points(self) -> list[tuple[int, int]]:
        return [(r, v) for r, v in enumerate(self.z, start=1)]

    def tail_count(self, v: int) -> int:
        """Number of ranks with z(r) >= v (the inverse view of the curve)."""
        return sum(1 for zv in self.z if zv >= v)


def rank_curve(final_counts: Sequence[int]) -> RankCurve:
    counts = [int(k) for k in final_counts]
    if any(k < 1 for k in counts):
        raise ValidationError("counts must all be at least 1")
    order = sorted(range(len(counts)), key=lambda i: (-counts[i], i))
    return RankCurve(tuple(counts[i] for i in order))


# ---------------------------------------------------------------------------
# Log-log regression


@dataclass(frozen=True)
class FitReport:
    """OLS of log10(y + shift) on log10(x) over a window."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int
    n_excluded: int
    window: tuple[float, float] | None = None
    shift: float = 0.0

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
            "n_excluded": self.n_excluded,
            "window": list(self.window) if self.window else None,
            "shift": self.shift,
        }


def loglog_fit(points: Iterable[tuple[float, float]], *,
               window: tuple[float, float] | None = None,
               shift: float = 0.0, min_points: int = 8) -> FitReport:
    """Least squares on log10 axes.

    Points with x outside the window, x <= 0, or y + shift <= 0 are
    excluded (their number is reported, never silently dropped). Fewer
    than ``min_points`` survivors is an estimation error.
    """
    xs: list[float] = []
    ys: list[float] = []
    excluded = 0
    for x, y in points:
        if x <= 0.0 or y + shift <= 0.0:
            excluded += 1
            continue
        if window is not None and not window[0] <= x <= window[1]:
            excluded += 1
            continue
        xs.append(math.log10(x))
        ys.append(math.log10(y + shift))
    if len(xs) < min_points:
        raise EstimationError(
            f"need at least {min_points} usable points, have {len(xs)}")
    result = stats.linregress(xs, ys)
    return FitReport(
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=float(result.rvalue) ** 2,
        n_points=len(xs),
        n_excluded=excluded,
        window=window,
        shift=shift,
    )


# ---------------------------------------------------------------------------
# Trajectories and parameter estimation


@dataclass(frozen=True)
class TrajectoryBundle:
    """The empirical inputs the estimators need, in one place.

    Comes from either a simulated trace or an ingested event stream:
    the colors-over-time checkpoints, per-color count checkpoints, and
    the final count vector.
    """

    horizon: int
    colors: tuple[tuple[int, int], ...]
    per_color: dict[int, tuple[tuple[int, int], ...]]
    final_counts: tuple[int, ...]


def bundle_from_trace(trace: Trace) -> TrajectoryBundle:
    return TrajectoryBundle(
        horizon=trace.horizon,
        colors=trace.checkpoints,
        per_color=dict(trace.tracked),
        final_counts=trace.final_counts,
    )


@dataclass(frozen=True)
class ParameterEstimates:
    """Fits and derived parameter estimates for one trajectory bundle.

    ``p_hat`` is only emitted when the colors-over-time slope is within
    0.1 of 1 (otherwise the intercept does not measure a trigger
    probability and the field stays None with a diagnostic).
    An ``eta_hat`` at or below -1 is impossible under the model, so it
    is reported through ``diagnostics`` rather than silently.
    """

    colors_fit: FitReport
    count_fits: dict[int, FitReport]
    rank_fit: FitReport | None
    rank_fit_shifted: FitReport | None
    theta_hat: float
    p_hat: float | None
    delta_hat: float
    alpha_hat: float | None
    eta_hat: float | None
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "colors_fit": self.colors_fit.to_dict(),
            "count_fits": {c: f.to_dict() for c, f in self.count_fits.items()},
            "rank_fit": self.rank_fit.to_dict() if self.rank_fit else None,
            "rank_fit_shifted": self.rank_fit_shifted.to_dict()
            if self.rank_fit_shifted else None,
            "theta_hat": self.theta_hat,
            "p_hat": self.p_hat,
            "delta_hat": self.delta_hat,
            "alpha_hat": self.alpha_hat,
            "eta_hat": self.eta_hat,
            "diagnostics": list(self.diagnostics),
        }


def estimate_parameters(bundle: TrajectoryBundle, *,
                        transient: float | None = None,
                        rank_floor: int = 20,
                        shift: float | None = None,
                        min_points: int = 8) -> ParameterEstimates:
    """Run the three regressions on one bundle and derive the estimators.

    ``transient`` is the smallest time entering regressions (i) and
    (ii); by default the window keeps the last decade and a half of
    checkpoints (horizon / 10^1.5), or starts at sqrt(horizon) on runs
    too short for that. Slope fits that reach further back pick up the
    slowly decaying early drift of the trajectories and bias the
    exponents low. ``rank_floor`` keeps only ranks with count >= 20 in
    regression (iii); the small-count tail is made of young colors
    still far below their limiting shares, which bends the curve down
    and steepens the fit. ``shift`` forces a second, shifted rank fit;
    by default the estimated eta-hat is used when it is available and
    admissible.
    """
    diagnostics: list[str] = []
    if transient is None:
        transient = max(math.sqrt(bundle.horizon),
                        bundle.horizon / 10 ** 1.5)
    window = (transient, float(bundle.horizon))

    colors_fit = loglog_fit(bundle.colors, window=window, min_points=min_points)
    theta_hat = colors_fit.slope

    p_hat: float | None = None
    if abs(colors_fit.slope - 1.0) <= 0.1:
        candidate = 10.0 ** colors_fit.intercept
        if not 0.0 < candidate < 1.0:
            raise EstimationError(
                f"colors-over-time intercept implies trigger probability "
                f"{candidate!r} outside (0, 1)")
        p_hat = candidate
    else:
        diagnostics.append(
            f"colors slope {colors_fit.slope:.3f} is not close to 1; "
            "p-hat not applicable")

    count_fits: dict[int, FitReport] = {}
    for c, traj in sorted(bundle.per_color.items()):
        try:
            count_fits[c] = loglog_fit(traj, window=window,
                                       min_points=min_points)
        except EstimationError:
            diagnostics.append(
                f"color {c} has too few checkpoints past the transient; "
                "skipped in delta-hat")
    if not count_fits:
        raise EstimationError(
            "no tracked color has enough checkpoints for a count fit")
    delta_hat = float(np.median([f.slope for f in count_fits.values()]))
    if delta_hat <= 0.0:
        raise EstimationError(
            f"delta-hat = {delta_hat!r} is not positive; the count "
            "trajectories do not look like power growth")

    rank_fit: FitReport | None = None
    rank_fit_shifted: FitReport | None = None
    alpha_hat: float | None = None
    rank_points = rank_curve(bundle.final_counts).points()
    usable = [(r, z) for r, z in rank_points if z >= rank_floor]
    try:
        rank_fit = loglog_fit(usable, min_points=min_points)
        alpha_hat = -rank_fit.slope
    except EstimationError:
        diagnostics.append(
            f"fewer than {min_points} ranks with count >= {rank_floor}; "
            "rank fit skipped")

    eta_hat: float | None = None
    if p_hat is not None:
        eta_hat = ((1.0 - p_hat) / delta_hat - 1.0) / p_hat
        if eta_hat <= -1.0:
            diagnostics.append(
                f"eta-hat = {eta_hat:.3f} <= -1 violates the model "
                "constraint; treat the fit as a model mismatch")

    shift_value = shift
    if shift_value is None and eta_hat is not None and eta_hat > -1.0:
        shift_value = eta_hat
    if rank_fit is not None and shift_value is not None:
        try:
            rank_fit_shifted = loglog_fit(usable, shift=shift_value,
                                          min_points=min_points)
        except EstimationError:
            diagnostics.append("shifted rank fit failed; shift too negative")

    return ParameterEstimates(
        colors_fit=colors_fit,
        count_fits=count_fits,
        rank_fit=rank_fit,
        rank_fit_shifted=rank_fit_shifted,
        theta_hat=theta_hat,
        p_hat=p_hat,
        delta_hat=delta_hat,
        alpha_hat=alpha_hat,
        eta_hat=eta_hat,
        diagnostics=tuple(diagnostics),
    )


@dataclass(frozen=True)
class PooledEstimates:
    """Across-replication means of the per-run estimates.

    eta_hat is recomputed from the pooled p_hat and delta_hat rather
    than averaged, matching how the single-run estimator is defined.
    """

    n_runs: int
    colors_slope: float
    count_slope: float
    rank_slope: float | None
    rank_slope_shifted: float | None
    p_hat: float | None
    delta_hat: float
    eta_hat: float | None

    def to_dict(self) -> dict:
        return {
            "n_runs": self.n_runs,
            "colors_slope": self.colors_slope,
            "count_slope": self.count_slope,
            "rank_slope": self.rank_slope,
            "rank_slope_shifted": self.rank_slope_shifted,
            "p_hat": self.p_hat,
            "delta_hat": self.delta_hat,
            "eta_hat": self.eta_hat,
        }


def pool_estimates(estimates: Sequence[ParameterEstimates]) -> PooledEstimates:
    if not estimates:
        raise EstimationError("nothing to pool")

    def mean(values: list[float]) -> float | None:
        return float(np.mean(values)) if values else None

    colors_slope = mean([e.colors_fit.slope for e in estimates])
    count_slope = mean([e.delta_hat for e in estimates])
    rank_slope = mean([e.rank_fit.slope for e in estimates
                       if e.rank_fit is not None])
    rank_shifted = mean([e.rank_fit_shifted.slope for e in estimates
                         if e.rank_fit_shifted is not None])
    p_hats = [e.p_hat for e in estimates if e.p_hat is not None]
    p_hat = mean(p_hats)
    delta_hat = count_slope
    eta_hat = None
    if p_hat is not None and delta_hat and delta_hat > 0.0:
        eta_hat = ((1.0 - p_hat) / delta_hat - 1.0) / p_hat
    return PooledEstimates(
        n_runs=len(estimates),
        colors_slope=colors_slope,
        count_slope=count_slope,
        rank_slope=rank_slope,
        rank_slope_shifted=rank_shifted,
        p_hat=p_hat,
        delta_hat=delta_hat,
        eta_hat=eta_hat,
    )


# ---------------------------------------------------------------------------
# Theoretical predictions and regime classification


@dataclass(frozen=True)
class ScenarioPrediction:
    """Predicted exponents for a (schedule, update) scenario.

    ``defined`` is False when the weight-to-color ratio limit that the
    power laws hinge on is zero or unknown; ``reason`` says why.
    """

    kind: str
    defined: bool
    reason: str | None = None
    ell: float | None = None
    delta: float | None = None
    beta: float | None = None
    alpha: float | None = None
    eta: float | None = None
    colors_slope: float | None = None
    count_slope: float | None = None
    rank_slope: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "defined": self.defined,
            "reason": self.reason,
            "ell": self.ell,
            "delta": self.delta,
            "beta": self.beta,
            "alpha": self.alpha,
            "eta": self.eta,
            "colors_slope": self.colors_slope,
            "count_slope": self.count_slope,
            "rank_slope": self.rank_slope,
        }


def theoretical_prediction(schedule: TriggerSchedule,
                           update: UpdateFunction) -> ScenarioPrediction:
    """Closed-form exponents where the model provides them.

    Constant trigger with affine weights: the weight-to-color ratio
    tends to ell = (rho + p rho_tilde)/(1 - p), individual counts grow
    like n^delta with delta = (1-p)/(1 + p eta), the spectrum follows a
    power law with exponent beta = ell/rho + 1 and the rank curve one
    with alpha = rho/ell (= delta here).

    Power-law trigger with affine weights: colors grow like n^theta,
    dominant counts linearly, ell = theta rho, beta = 1 + theta,
    alpha = 1/theta.

    Decaying-to-zero color growth (harmonic triggers) or sublinear
    weights (root-law updates) drive the ratio to zero: no power-law
    prediction exists and the result says so instead of guessing.
    """
    if isinstance(update, PowerRoot):
        return ScenarioPrediction(
            kind="none", defined=False,
            reason="sampling weights grow sublinearly, the weight-to-color "
                   "ratio limit is zero; no power-law prediction")
    if isinstance(schedule, Constant) and isinstance(update, Linear):
        p = schedule.p
        rho, eta = update.rho, update.eta
        ell = (rho + p * update.rho_tilde) / (1.0 - p)
        delta = (1.0 - p) / (1.0 + p * eta)
        beta = ell / rho + 1.0
        alpha = rho / ell
        return ScenarioPrediction(
            kind="constant_p", defined=True,
            ell=ell, delta=delta, beta=beta, alpha=alpha, eta=eta,
            colors_slope=1.0, count_slope=delta, rank_slope=-delta)
    if isinstance(schedule, PowerLaw) and isinstance(update, Linear):
        theta = schedule.theta
        rho, eta = update.rho, update.eta
        ell = theta * rho
        return ScenarioPrediction(
            kind="power_law_p", defined=True,
            ell=ell, delta=1.0, beta=1.0 + theta, alpha=1.0 / theta, eta=eta,
            colors_slope=theta, count_slope=1.0, rank_slope=-1.0 / theta)
    if isinstance(schedule, Harmonic):
        return ScenarioPrediction(
            kind="none", defined=False,
            reason="trigger probabilities decay like 1/n, the weight-to-"
                   "color ratio limit is zero; no power-law prediction")
    return ScenarioPrediction(
        kind="none", defined=False,
        reason="no closed-form prediction for this schedule/update pair")


@dataclass(frozen=True)
class RegimeReport:
    """Qualitative classification of a (schedule, update) pair."""

    colors: str                 # "finite" | "infinite" | "inapplicable"
    growth: str | None          # human-readable growth law when infinite
    dominance: str              # "single_dominant" | "all_infinitely_often"
    #                             | "inapplicable"
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "colors": self.colors,
            "growth": self.growth,
            "dominance": self.dominance,
            "notes": list(self.notes),
        }


def _table_growth_slope(update: Tabulated) -> float | None:
    values = update.values
    if len(values) < 4:
        return None
    ks = np.arange(1, len(values) + 1, dtype=np.float64)
    tail = len(values) // 2
    result = stats.linregress(np.log(ks[tail:]), np.log(np.asarray(values[tail:])))
    return float(result.slope)


def regime_classifier(schedule: TriggerSchedule,
                      update: UpdateFunction) -> RegimeReport:
    """Two independent verdicts from two convergence tests.

    Colors: the trigger probabilities are a summable sequence iff only
    finitely many colors ever appear. Dominance: when the triggers stay
    bounded away from 1, a single color eventually takes almost every
    step iff sum 1/F(n) converges; affine weights recur forever, at
    least quadratic tables concentrate. Tabulated updates are judged by
    a log-log growth fit over the table's tail half, and explicit
    finite schedules carry no asymptotics at all.
    """
    notes: list[str] = []

    if isinstance(schedule, Constant):
        colors, growth = "infinite", f"~ {schedule.p:g}*n"
    elif isinstance(schedule, PowerLaw):
        colors = "infinite"
        growth = f"~ {schedule.scale / schedule.theta:g}*n^{schedule.theta:g}"
    elif isinstance(schedule, Harmonic):
        colors, growth = "infinite", f"~ {schedule.scale:g}*ln(n)"
    elif isinstance(schedule, Geometric):
        colors, growth = "finite", None
        notes.append("trigger probabilities are summable, so the color set "
                     "stops growing almost surely")
    elif isinstance(schedule, Explicit):
        colors, growth = "inapplicable", None
        notes.append("explicit schedules are finite-horizon; no asymptotic "
                     "color regime")
    else:
        colors, growth = "inapplicable", None

    if isinstance(update, Linear):
        dominance = "all_infinitely_often"
    elif isinstance(update, PowerRoot):
        dominance = "all_infinitely_often"
        notes.append("1/F(n) = n^(-1/rho) with rho > 1 diverges")
    elif isinstance(update, Tabulated):
        slope = _table_growth_slope(update)
        if slope is None:
            dominance = "inapplicable"
            notes.append("table too short to judge weight growth")
        elif slope >= 1.5:
            dominance = "single_dominant"
            notes.append(f"table grows like k^{slope:.2f}; 1/F is summable")
        elif slope <= 1.05:
            dominance = "all_infinitely_often"
            notes.append(f"table grows like k^{slope:.2f}; 1/F diverges")
        else:
            dominance = "inapplicable"
            notes.append(f"table growth k^{slope:.2f} is too close to "
                         "linear to classify confidently")
    else:
        dominance = "inapplicable"

    return RegimeReport(colors=colors, growth=growth, dominance=dominance,
                        notes=tuple(notes))


# ---------------------------------------------------------------------------
# Dominance diagnostics and the growth/rank exponent relation


@dataclass(frozen=True)
class DominanceReport:
    leading_share: float
    second_share: float
    gini: float

    def to_dict(self) -> dict:
        return {
            "leading_share": self.leading_share,
            "second_share": self.second_share,
            "gini": self.gini,
        }


def dominance_diagnostic(final_counts: Sequence[int],
                         update: UpdateFunction | None = None,
                         ) -> DominanceReport:
    """Empirical witness of concentration: top shares and a Gini index.

    With an update function the top shares are measured in sampling
    weight, F(K_c) over the total weight: that is the probability mass
    the next non-triggered draw would give each color, and it is the
    quantity that concentrates on one color in the single-dominant
    regime (a count share never can while triggers keep minting new
    colors). Without an update the shares are plain count shares; the
    two coincide for F(x) = x. The Gini index is always over counts.
    """
    counts = np.asarray(sorted(final_counts, reverse=True), dtype=np.float64)
    if counts.size == 0 or np.any(counts < 1):
        raise ValidationError("counts must be nonempty, all at least 1")
    if update is None:
        weights = counts
    else:
        weights = np.array([update(int(k)) for k in counts])
    weight_total = float(weights.sum())
    leading = float(weights[0]) / weight_total
    second = float(weights[1]) / weight_total if weights.size > 1 else 0.0
    total = float(counts.sum())
    ascending = counts[::-1]
    C = counts.size
    ranks = np.arange(1, C + 1)
    gini = float(2.0 * np.dot(ranks, ascending) / (C * total) - (C + 1.0) / C)
    return DominanceReport(leading_share=leading, second_share=second,
                           gini=gini)


@dataclass(frozen=True)
class HeapsZipf:
    product: float
    deviation: float

    def to_dict(self) -> dict:
        return {"product": self.product, "deviation": self.deviation}


def heaps_zipf_check(theta_hat: float, alpha_hat: float) -> HeapsZipf:
    """The growth and rank exponents should multiply to 1; report the gap."""
    if not (theta_hat > 0.0 and alpha_hat > 0.0):
        raise ValidationError("both exponents must be positive")
    product = theta_hat * alpha_hat
    return HeapsZipf(product=product, deviation=abs(product - 1.0))
