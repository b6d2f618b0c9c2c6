"""The actual work behind each endpoint/subcommand.

These functions take validated request models and return response
models. The HTTP app and the CLI both call them directly, so the two
surfaces cannot drift apart.
"""

from __future__ import annotations

from .. import analysis, approx, exact_simon, urn_core
from ..errors import EstimationError, ValidationError
from . import schemas


def run_simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    config = req.to_config()
    traces = urn_core.replicate(config, req.replications, threads=req.threads)

    runs: list[schemas.RunSummary] = []
    estimates: list[analysis.ParameterEstimates] = []
    for trace in traces:
        bundle = analysis.bundle_from_trace(trace)
        try:
            est = analysis.estimate_parameters(
                bundle, transient=req.transient, rank_floor=req.rank_floor,
                shift=req.shift)
            estimates.append(est)
            runs.append(schemas.RunSummary(
                replication=trace.replication,
                num_colors=trace.num_colors,
                estimates=est.to_dict()))
        except EstimationError as exc:
            runs.append(schemas.RunSummary(
                replication=trace.replication,
                num_colors=trace.num_colors,
                estimate_error=str(exc)))

    pooled = analysis.pool_estimates(estimates).to_dict() if estimates else None
    prediction = analysis.theoretical_prediction(
        config.schedule, config.update).to_dict()
    regime = analysis.regime_classifier(config.schedule, config.update).to_dict()

    return schemas.SimulateResponse(
        replications=req.replications,
        horizon=req.horizon,
        seed=req.seed,
        runs=runs,
        pooled=pooled,
        prediction=prediction,
        regime=regime,
        traces=[_trace_doc(t) for t in traces] if req.include_traces else None,
    )


def _trace_doc(trace: urn_core.Trace) -> dict:
    import json

    return json.loads(trace.to_json())


def run_exact(req) -> schemas.ExactResponse:
    q = req.quantity
    if q == "colors_pmf":
        dist = exact_simon.colors_pmf(req.n, req.p)
        return schemas.ExactResponse(
            formula="P(C_n = i) = C(n-1, i-1) p^(i-1) (1-p)^(n-i)",
            params={"n": req.n, "p": req.p, "support": [1, req.n]},
            value=[float(v) for v in dist.probs])
    if q == "mean_colors":
        mean, var = exact_simon.colors_moments(req.n, req.p)
        return schemas.ExactResponse(
            formula="E[C_n] = 1 + p(n-1); Var[C_n] = p(1-p)(n-1)",
            params={"n": req.n, "p": req.p},
            value={"mean": mean, "variance": var})
    if q == "absent":
        value = exact_simon.prob_color_absent(req.n, req.c, req.p)
        return schemas.ExactResponse(
            formula="P(K_{n,c} = 0), split over trigger-count paths",
            params={"n": req.n, "c": req.c, "p": req.p},
            value=value)
    if q == "expected_count":
        value = exact_simon.expected_count(req.n, req.c, req.p)
        return schemas.ExactResponse(
            formula="E[K_{n,c}] via Gamma-ratio prefactor and partial series",
            params={"n": req.n, "c": req.c, "p": req.p},
            value=value)
    if q == "color1":
        res = exact_simon.expected_count_color1(req.n, req.p)
        return schemas.ExactResponse(
            formula="E[K_{n,1}] = Gamma(n+1-p)/(Gamma(2-p) Gamma(n))",
            params={"n": req.n, "p": req.p},
            value={"exact": res.exact, "asymptotic": res.asymptotic},
            error_bound=res.abs_error)
    if q == "prefactor":
        value = exact_simon.asymptotic_prefactor(req.c, req.p)
        return schemas.ExactResponse(
            formula="lim E[K_{n,c}]/n^(1-p) = p^(c-1) (Lambda/(1-p)^c "
                    "+ Gamma(c)/Gamma(c+1-p))",
            params={"c": req.c, "p": req.p},
            value=value)
    if q == "lambda":
        res = exact_simon.lambda_series(req.c, req.p, upto=req.upto,
                                        tolerance=req.tolerance)
        return schemas.ExactResponse(
            formula="sum_{i>c} C(i-2, c-2) (1-p)^i Gamma(i)/Gamma(i+1-p)",
            params={"c": req.c, "p": req.p, "upto": req.upto,
                    "tolerance": req.tolerance, "terms": res.terms},
            value=res.value,
            error_bound=res.tail_bound)
    if q == "dynamic_color1":
        schedule = req.schedule.to_domain()
        value = exact_simon.dynamic_mean_color1(schedule, req.n)
        return schemas.ExactResponse(
            formula="E[K_{n,1}] = prod_{i=2..n} (i - p_i)/(i - 1)",
            params={"n": req.n, "schedule": schedule.config()},
            value=value)
    raise ValidationError(f"unknown exact quantity {q!r}")


def run_approx(req: schemas.ApproxRequest) -> schemas.ApproxResponse:
    schedule = req.schedule.to_domain()
    report = approx.barbour_holst(schedule, req.n)
    tv_exact = None
    tv_uncertainty = None
    if req.exact_tv:
        pb = approx.poisson_binomial_pmf(schedule, req.n)
        tv = approx.total_variation(
            pb, approx.PoissonLaw(report.lambda1))
        tv_exact = tv.value
        tv_uncertainty = tv.uncertainty
    return schemas.ApproxResponse(
        n=req.n,
        lambda1=report.lambda1,
        lambda2=report.lambda2,
        tv_bound=report.tv_bound,
        clt_mean=report.clt_mean,
        clt_sd=report.clt_sd,
        tv_exact=tv_exact,
        tv_uncertainty=tv_uncertainty,
    )


def run_analyze(req: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
    try:
        trace = urn_core.Trace.from_json(_as_json(req.trace))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(
            f"not a trace document: {exc!r}") from None
    bundle = analysis.bundle_from_trace(trace)
    est = analysis.estimate_parameters(
        bundle, transient=req.transient, rank_floor=req.rank_floor,
        shift=req.shift)
    spectrum = analysis.frequency_spectrum(trace.final_counts)
    curve = analysis.rank_curve(trace.final_counts)
    schedule = urn_core.schedule_from_config(trace.config["schedule"])
    update = urn_core.update_from_config(trace.config["update"])
    dominance = analysis.dominance_diagnostic(trace.final_counts, update)
    return schemas.AnalyzeResponse(
        estimates=est.to_dict(),
        spectrum=[[float(k), float(q), float(f)]
                  for k, q, f in spectrum.to_rows()],
        rank=[[r, z] for r, z in curve.points()],
        dominance=dominance.to_dict(),
        prediction=analysis.theoretical_prediction(schedule, update).to_dict(),
        regime=analysis.regime_classifier(schedule, update).to_dict(),
    )


def _as_json(doc: dict) -> str:
    import json

    return json.dumps(doc)


def run_fit(req: schemas.FitRequest) -> schemas.FitResponse:
    from .. import ingest

    records = tuple((e.timestamp, e.label) for e in req.events)
    reorders = sum(1 for a, b in zip(records, records[1:]) if b[0] < a[0])
    stream = ingest.EventStream(
        records=tuple(sorted(records, key=lambda r: r[0])),
        reorder_count=reorders)
    return fit_from_stream(
        stream, top_m=req.top_m,
        checkpoints_per_decade=req.checkpoints_per_decade,
        transient=req.transient, rank_floor=req.rank_floor, shift=req.shift)


def fit_from_stream(stream, *, top_m: int = 20,
                    checkpoints_per_decade: int = 64,
                    transient: float | None = None, rank_floor: int = 20,
                    shift: float | None = None) -> schemas.FitResponse:
    """Fit an already-parsed event stream (the CLI's file path)."""
    from .. import ingest

    mapping = ingest.to_history(stream)
    bundle = ingest.empirical_trajectories(
        mapping.history, checkpoints_per_decade=checkpoints_per_decade,
        top_m=top_m)
    est = analysis.estimate_parameters(
        bundle, transient=transient, rank_floor=rank_floor, shift=shift)
    dominance = analysis.dominance_diagnostic(bundle.final_counts)
    color_to_label = mapping.color_to_label
    top = sorted(bundle.per_color.keys(),
                 key=lambda c: (-bundle.final_counts[c - 1], c))
    return schemas.FitResponse(
        num_events=len(stream),
        num_labels=len(mapping.label_to_color),
        reorder_count=stream.reorder_count,
        estimates=est.to_dict(),
        dominance=dominance.to_dict(),
        top_labels=[color_to_label[c] for c in top],
    )


def run_oracle(req: schemas.OracleRequest) -> schemas.OracleResponse:
    """Compare independent computation routes on one parameter point.

    Always checks the closed forms (color-count pmf, absence
    probability, expected counts, Bernoulli-sum convolution) against the
    brute-force path enumeration; with ``replications`` set, also checks
    the stochastic engine's empirical marginals against the enumeration
    in total variation.
    """
    import numpy as np

    from ..distributions import ExactDistribution

    schedule = urn_core.Constant(req.p)
    update = urn_core.Linear(1.0, 0.0)
    enum = urn_core.enumerate_exact(req.n, schedule, update)
    checks: list[schemas.OracleCheck] = []

    def add(name: str, error: float, tolerance: float) -> None:
        checks.append(schemas.OracleCheck(
            name=name, error=float(error), tolerance=tolerance,
            passed=bool(error <= tolerance)))

    pmf = exact_simon.colors_pmf(req.n, req.p)
    err = max(abs(pmf.pmf(i) - enum.colors.pmf(i))
              for i in range(1, req.n + 1))
    add("colors_pmf vs enumeration", err, req.tolerance)

    err = max(abs(exact_simon.prob_color_absent(req.n, c, req.p)
                  - enum.counts[c].pmf(0))
              for c in range(2, req.n + 1))
    add("prob_color_absent vs enumeration", err, req.tolerance)

    err = max(abs(exact_simon.expected_count(req.n, c, req.p)
                  - enum.expected_count(c))
              for c in range(1, req.n + 1))
    add("expected_count vs enumeration", err, req.tolerance)

    pb = approx.poisson_binomial_pmf(schedule, req.n)
    err = max(abs(pb.pmf(i) - enum.colors.pmf(i)) for i in range(req.n + 1))
    add("bernoulli convolution vs enumeration", err, req.tolerance)

    if req.replications:
        reps = req.replications
        rng_counts = np.zeros(req.n + 1, dtype=np.int64)
        from .._rng import UniformSource, replication_generator

        source = UniformSource(replication_generator(req.seed, 0))
        for _ in range(reps):
            state = urn_core.UrnState(update, capacity_hint=req.n + 1)
            for _ in range(req.n):
                urn_core.step(state, schedule, source)
            rng_counts[state.num_colors] += 1
        empirical = ExactDistribution(0, rng_counts / reps)
        tv = approx.total_variation(empirical, enum.colors)
        add(f"simulated colors law vs enumeration (TV, {reps} reps)",
            tv.value, 0.01)

    max_error = max(c.error for c in checks)
    return schemas.OracleResponse(
        passed=all(c.passed for c in checks),
        max_error=max_error,
        checks=checks,
    )
