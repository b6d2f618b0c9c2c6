"""Command-line front end.

Each subcommand builds the same request model its HTTP endpoint takes
and runs the shared handler in process, so the two surfaces cannot
drift apart. Human-readable summaries go to standard output (--json
switches them to JSON); machine artifacts go to files, each embedding
the resolved config so it can be re-run with --config.

Exit codes: 0 success, 1 usage, 2 validation, 3 oracle failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from typing import Sequence

import pydantic

from . import __version__, ingest, urn_core
from .errors import EstimationError, OracleMismatch, ValidationError
from .service import handlers, schemas

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_ORACLE = 3


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit status 2 for usage errors; here 2 means
    a validation failure, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# Config plumbing


def _config_doc(args) -> dict:
    """Defaults from --config; flags set later override them.

    A previously emitted artifact file (with "artifact" and "config"
    keys) is accepted as-is: its embedded config is unwrapped, which is
    what makes re-running an output reproduce it.
    """
    path = getattr(args, "config", None)
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    if isinstance(doc, dict) and "config" in doc and "artifact" in doc:
        doc = doc["config"]
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    return dict(doc)


def _set_if(doc: dict, key: str, value) -> None:
    if value is not None:
        doc[key] = value


def _require(args, doc: dict, *keys: str) -> None:
    missing = [k for k in keys if doc.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        args.parser.error(
            f"missing required value(s): {flags} (flags or --config)")


def _schedule_doc(args) -> dict | None:
    """Trigger schedule from flags; a bare --p means a constant one."""
    kind = getattr(args, "schedule", None)
    if kind is None:
        if getattr(args, "p", None) is not None:
            return {"kind": "constant", "p": args.p}
        return None
    doc: dict = {"kind": kind}
    if kind == "constant":
        if args.p is None:
            args.parser.error("--schedule constant needs --p")
        doc["p"] = args.p
    elif kind == "power_law":
        if args.theta is None:
            args.parser.error("--schedule power_law needs --theta")
        doc["theta"] = args.theta
    elif kind == "geometric":
        if args.ratio is None:
            args.parser.error("--schedule geometric needs --ratio")
        doc["ratio"] = args.ratio
    elif kind == "explicit":
        if args.probs is None:
            args.parser.error("--schedule explicit needs --probs")
        doc["probs"] = args.probs
    if kind in ("power_law", "harmonic", "geometric"):
        _set_if(doc, "scale", args.scale)
        _set_if(doc, "clamp", args.clamp)
    return doc


def _update_doc(args) -> dict | None:
    """Weight map from flags; bare --rho/--rho-tilde mean a linear one."""
    kind = getattr(args, "update", None)
    if kind is None:
        if args.rho is not None or args.rho_tilde is not None:
            doc = {"kind": "linear",
                   "rho": args.rho if args.rho is not None else 1.0}
            _set_if(doc, "rho_tilde", args.rho_tilde)
            return doc
        if args.table is not None:
            return {"kind": "tabulated", "values": args.table}
        return None
    doc = {"kind": kind}
    if kind == "linear":
        doc["rho"] = args.rho if args.rho is not None else 1.0
        _set_if(doc, "rho_tilde", args.rho_tilde)
    elif kind == "power_root":
        if args.rho is None:
            args.parser.error("--update power_root needs --rho (> 1)")
        doc["rho"] = args.rho
    elif kind == "tabulated":
        if args.table is None:
            args.parser.error("--update tabulated needs --table")
        doc["values"] = args.table
    return doc


# ---------------------------------------------------------------------------
# Output plumbing


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _artifact(config: dict, result) -> dict:
    """File envelope. The timestamp is the only nondeterministic field,
    kept on its own line so diffs of two runs show nothing else."""
    return {
        "artifact": {
            "generated_at": datetime.now(timezone.utc)
            .strftime("%Y-%m-%dT%H:%M:%SZ"),
            "tool": "urnkit",
            "version": __version__,
        },
        "config": config,
        "result": result,
    }


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(args, req_doc: dict, result) -> None:
    output = getattr(args, "output", None)
    if output:
        _write(output, _dump(_artifact(req_doc, result)))
    if args.json:
        sys.stdout.write(_dump(result))


def _f(value, width: int = 0, prec: int = 3) -> str:
    text = "-" if value is None else f"{value:.{prec}f}"
    return f"{text:>{width}}" if width else text


# ---------------------------------------------------------------------------
# Printers


def _print_estimates(est: dict) -> None:
    rank = est["rank_fit"]["slope"] if est["rank_fit"] else None
    shifted = (est["rank_fit_shifted"]["slope"]
               if est["rank_fit_shifted"] else None)
    line = (f"slopes      colors {_f(est['theta_hat'])}, "
            f"counts {_f(est['delta_hat'])}, rank {_f(rank)}")
    if shifted is not None:
        line += f", shifted rank {_f(shifted)}"
    print(line)
    print(f"estimates   theta^ {_f(est['theta_hat'])}  p^ {_f(est['p_hat'])}  "
          f"delta^ {_f(est['delta_hat'])}  alpha^ {_f(est['alpha_hat'])}  "
          f"eta^ {_f(est['eta_hat'])}")
    for note in est.get("diagnostics", ()):
        print(f"note        {note}")


def _print_scenario(prediction: dict, regime: dict) -> None:
    if prediction["defined"]:
        print(f"predicted   colors slope {_f(prediction['colors_slope'])}, "
              f"count slope {_f(prediction['count_slope'])}, "
              f"rank slope {_f(prediction['rank_slope'])} "
              f"(beta {_f(prediction['beta'])}, alpha {_f(prediction['alpha'])})")
    else:
        print(f"predicted   {prediction['reason']}")
    growth = f" ({regime['growth']})" if regime.get("growth") else ""
    print(f"regime      colors {regime['colors']}{growth}; "
          f"dominance {regime['dominance']}")


def _print_simulate(resp: schemas.SimulateResponse) -> None:
    print(f"replications {resp.replications}, horizon {resp.horizon}, "
          f"seed {resp.seed}")
    print(f"{'rep':>4} {'colors':>8} {'C slope':>8} {'K slope':>8} "
          f"{'rank':>8} {'shifted':>8} {'p^':>7} {'eta^':>7}")
    for run in resp.runs:
        if run.estimates is None:
            print(f"{run.replication:>4} {run.num_colors:>8}  "
                  f"(no fit: {run.estimate_error})")
            continue
        est = run.estimates
        rank = est["rank_fit"]["slope"] if est["rank_fit"] else None
        shifted = (est["rank_fit_shifted"]["slope"]
                   if est["rank_fit_shifted"] else None)
        print(f"{run.replication:>4} {run.num_colors:>8} "
              f"{_f(est['theta_hat'], 8)} {_f(est['delta_hat'], 8)} "
              f"{_f(rank, 8)} {_f(shifted, 8)} "
              f"{_f(est['p_hat'], 7)} {_f(est['eta_hat'], 7)}")
    if resp.pooled:
        pool = resp.pooled
        print(f"{'mean':>4} {'':>8} {_f(pool['colors_slope'], 8)} "
              f"{_f(pool['count_slope'], 8)} {_f(pool['rank_slope'], 8)} "
              f"{_f(pool['rank_slope_shifted'], 8)} "
              f"{_f(pool['p_hat'], 7)} {_f(pool['eta_hat'], 7)}")
    _print_scenario(resp.prediction, resp.regime)


def _print_exact(resp: schemas.ExactResponse) -> None:
    print(f"formula  {resp.formula}")
    params = "  ".join(f"{k}={v}" for k, v in resp.params.items()
                       if v is not None)
    print(f"params   {params}")
    value = resp.value
    if isinstance(value, dict):
        for key, v in value.items():
            print(f"{key:<8} {v:.12g}")
    elif isinstance(value, list):
        shown = value if len(value) <= 20 else value[:15]
        for i, v in enumerate(shown, start=1):
            print(f"  i={i:<6} {v:.12g}")
        if len(value) > len(shown):
            print(f"  ... {len(value) - len(shown)} more entries "
                  "(--json or --output for all)")
    else:
        print(f"value    {value:.12g}")
    if resp.error_bound is not None:
        print(f"error    <= {resp.error_bound:.3e}")


def _print_approx(resp: schemas.ApproxResponse) -> None:
    print(f"n         {resp.n}")
    print(f"lambda1   {resp.lambda1:.10g}")
    print(f"lambda2   {resp.lambda2:.10g}")
    print(f"tv bound  {resp.tv_bound:.10g}")
    print(f"clt       mean {resp.clt_mean:.10g}, sd {resp.clt_sd:.10g}")
    if resp.tv_exact is not None:
        line = f"tv exact  {resp.tv_exact:.10g}"
        if resp.tv_uncertainty:
            line += f" (+/- {resp.tv_uncertainty:.2e} truncation)"
        print(line)


def _print_analyze(resp: schemas.AnalyzeResponse) -> None:
    _print_estimates(resp.estimates)
    dom = resp.dominance
    print(f"dominance   leading share {dom['leading_share']:.3f}, "
          f"second {dom['second_share']:.3f}, gini {dom['gini']:.3f}")
    theta, alpha = resp.estimates["theta_hat"], resp.estimates["alpha_hat"]
    if alpha is not None and theta > 0 and alpha > 0:
        print(f"exponents   theta^ * alpha^ = {theta * alpha:.3f} "
              "(1 under a pure power law)")
    _print_scenario(resp.prediction, resp.regime)


def _print_fit(resp: schemas.FitResponse) -> None:
    print(f"events      {resp.num_events}")
    print(f"labels      {resp.num_labels}")
    if resp.reorder_count:
        print(f"reordered   {resp.reorder_count} adjacent pairs "
              "(sorted by timestamp)")
    _print_estimates(resp.estimates)
    dom = resp.dominance
    print(f"dominance   leading share {dom['leading_share']:.3f}, "
          f"second {dom['second_share']:.3f}, gini {dom['gini']:.3f}")
    print("top labels  " + ", ".join(resp.top_labels[:10]))


def _print_oracle(resp: schemas.OracleResponse) -> None:
    width = max(len(c.name) for c in resp.checks)
    for check in resp.checks:
        status = "ok" if check.passed else "FAIL"
        print(f"{check.name:<{width}}  {check.error:.3e}  "
              f"(tolerance {check.tolerance:.1e})  {status}")
    verdict = "PASS" if resp.passed else "FAIL"
    print(f"oracle {verdict}: max deviation {resp.max_error:.3e}")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_simulate(args) -> int:
    doc = _config_doc(args)
    _set_if(doc, "schedule", _schedule_doc(args))
    _set_if(doc, "update", _update_doc(args))
    for key in ("horizon", "seed", "replications", "threads",
                "checkpoints_per_decade", "capture_history", "max_colors",
                "transient", "rank_floor", "shift"):
        _set_if(doc, key, getattr(args, key))
    _set_if(doc, "tracked_colors", args.tracked)
    _require(args, doc, "schedule", "horizon")
    stdout_traces = bool(doc.get("include_traces")) and not args.out
    if args.out:
        doc["include_traces"] = True
    req = schemas.SimulateRequest.model_validate(doc)
    resp = handlers.run_simulate(req)

    result = resp.model_dump(mode="json")
    traces = result.get("traces")
    if not stdout_traces:
        result["traces"] = None
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for tdoc in traces or ():
            rep = tdoc["replication"]
            text = json.dumps(tdoc, sort_keys=True,
                              separators=(",", ":")) + "\n"
            _write(os.path.join(args.out, f"trace_{rep:04d}.json"), text)
            if args.csv:
                trace = urn_core.Trace.from_json(json.dumps(tdoc))
                trace.write_csv_dir(os.path.join(args.out, f"trace_{rep:04d}"))
        _write(os.path.join(args.out, "summary.json"),
               _dump(_artifact(req.model_dump(mode="json"), result)))
    if args.json:
        sys.stdout.write(_dump(result))
    else:
        _print_simulate(resp)
    return EXIT_OK


def cmd_exact(args) -> int:
    doc = _config_doc(args)
    doc["quantity"] = args.quantity.replace("-", "_")
    if args.quantity == "dynamic-color1":
        _set_if(doc, "schedule", _schedule_doc(args))
        _set_if(doc, "n", args.n)
        _require(args, doc, "schedule", "n")
    else:
        for key in ("n", "c", "p", "upto", "tolerance"):
            if hasattr(args, key):
                _set_if(doc, key, getattr(args, key))
        if args.quantity == "lambda":
            if (doc.get("upto") is None) == (doc.get("tolerance") is None):
                args.parser.error("give exactly one of --upto or --tolerance")
        required = {"colors-pmf": ("n", "p"), "mean-colors": ("n", "p"),
                    "absent": ("n", "c", "p"),
                    "expected-count": ("n", "c", "p"), "color1": ("n", "p"),
                    "prefactor": ("c", "p"), "lambda": ("c", "p")}
        _require(args, doc, *required[args.quantity])
    req = schemas.ExactRequestHolder(request=doc).request
    resp = handlers.run_exact(req)
    _emit(args, req.model_dump(mode="json"), resp.model_dump(mode="json"))
    if not args.json:
        _print_exact(resp)
    return EXIT_OK


def cmd_approx(args) -> int:
    doc = _config_doc(args)
    _set_if(doc, "schedule", _schedule_doc(args))
    _set_if(doc, "n", args.n)
    if args.exact_tv:
        doc["exact_tv"] = True
    _require(args, doc, "schedule", "n")
    req = schemas.ApproxRequest.model_validate(doc)
    resp = handlers.run_approx(req)
    _emit(args, req.model_dump(mode="json"), resp.model_dump(mode="json"))
    if not args.json:
        _print_approx(resp)
    return EXIT_OK


def cmd_analyze(args) -> int:
    doc = _config_doc(args)
    if args.trace is not None:
        with open(args.trace, encoding="utf-8") as fh:
            doc["trace"] = json.load(fh)
    for key in ("transient", "rank_floor", "shift"):
        _set_if(doc, key, getattr(args, key))
    _require(args, doc, "trace")
    req = schemas.AnalyzeRequest.model_validate(doc)
    resp = handlers.run_analyze(req)
    _emit(args, req.model_dump(mode="json"), resp.model_dump(mode="json"))
    if not args.json:
        _print_analyze(resp)
    return EXIT_OK


def cmd_fit(args) -> int:
    doc = _config_doc(args)
    _set_if(doc, "events", args.events)
    for key in ("format", "timestamp_field", "label_field", "delimiter",
                "top_m", "checkpoints_per_decade", "transient", "rank_floor",
                "shift"):
        _set_if(doc, key, getattr(args, key))
    _require(args, doc, "events")
    path = str(doc["events"])
    if doc.get("format") is None:
        doc["format"] = ("jsonl" if path.endswith((".jsonl", ".ndjson"))
                         else "csv")
    doc.setdefault("timestamp_field", "timestamp")
    doc.setdefault("label_field", "label")
    doc.setdefault("delimiter", ",")
    doc.setdefault("top_m", 20)
    doc.setdefault("checkpoints_per_decade", 64)
    doc.setdefault("rank_floor", 20)

    stream = ingest.load_events(
        path, doc["format"], timestamp_field=doc["timestamp_field"],
        label_field=doc["label_field"], delimiter=doc["delimiter"])
    resp = handlers.fit_from_stream(
        stream, top_m=int(doc["top_m"]),
        checkpoints_per_decade=int(doc["checkpoints_per_decade"]),
        transient=doc.get("transient"), rank_floor=int(doc["rank_floor"]),
        shift=doc.get("shift"))
    _emit(args, doc, resp.model_dump(mode="json"))
    if not args.json:
        _print_fit(resp)
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc = _config_doc(args)
    for key in ("n", "p", "tolerance", "replications", "seed"):
        _set_if(doc, key, getattr(args, key))
    req = schemas.OracleRequest.model_validate(doc)
    resp = handlers.run_oracle(req)
    _emit(args, req.model_dump(mode="json"), resp.model_dump(mode="json"))
    if not args.json:
        _print_oracle(resp)
    if not resp.passed:
        raise OracleMismatch(
            f"max deviation {resp.max_error:.6e} exceeds tolerance")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser assembly


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="urnkit",
        description="Simulate, compute and fit triggered urn models.")
    parser.add_argument("--version", action="version",
                        version=f"urnkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")

    out_flags = argparse.ArgumentParser(add_help=False)
    out_flags.add_argument("--json", action="store_true",
                           help="print the JSON response instead of a summary")
    out_flags.add_argument("--output", metavar="FILE",
                           help="also write a JSON artifact (config + result)")
    out_flags.add_argument("--config", metavar="FILE",
                           help="JSON file with defaults; flags override; "
                                "a previously emitted artifact works as-is")

    sched_flags = argparse.ArgumentParser(add_help=False)
    sched_flags.add_argument(
        "--schedule",
        choices=("constant", "power_law", "harmonic", "geometric", "explicit"),
        help="trigger schedule kind (a bare --p means constant)")
    sched_flags.add_argument("--p", type=float,
                             help="constant trigger probability in (0, 1)")
    sched_flags.add_argument("--theta", type=float,
                             help="power-law growth exponent in (0, 1)")
    sched_flags.add_argument("--scale", type=float,
                             help="schedule scale factor (default 1)")
    sched_flags.add_argument("--ratio", type=float,
                             help="geometric decay ratio in (0, 1)")
    sched_flags.add_argument("--clamp", type=float,
                             help="upper clamp on probabilities "
                                  "(default 1 - 1e-6)")
    sched_flags.add_argument("--probs", type=_float_list, metavar="P1,P2,...",
                             help="explicit per-step trigger probabilities")

    upd_flags = argparse.ArgumentParser(add_help=False)
    upd_flags.add_argument("--update",
                           choices=("linear", "power_root", "tabulated"),
                           help="weight map kind (default linear)")
    upd_flags.add_argument("--rho", type=float,
                           help="linear slope, or root exponent for "
                                "power_root (default 1)")
    upd_flags.add_argument("--rho-tilde", type=float,
                           help="linear offset (default 0)")
    upd_flags.add_argument("--table", type=_float_list, metavar="F1,F2,...",
                           help="tabulated weights F(1),F(2),... "
                                "(strictly increasing)")

    sim = sub.add_parser("simulate", parents=[out_flags, sched_flags,
                                              upd_flags],
                         help="run seeded replications and fit the slopes")
    sim.add_argument("--horizon", type=int, help="number of steps per run")
    sim.add_argument("--seed", type=int, help="master seed (default 0)")
    sim.add_argument("--replications", type=int,
                     help="independent runs (default 1)")
    sim.add_argument("--threads", type=int,
                     help="worker processes (default: all cores); results "
                          "do not depend on this")
    sim.add_argument("--tracked", type=_int_list, metavar="C1,C2,...",
                     help="color labels to track over time")
    sim.add_argument("--checkpoints-per-decade", type=int,
                     help="trajectory sampling density (default 64)")
    sim.add_argument("--capture-history",
                     action=argparse.BooleanOptionalAction, default=None,
                     help="keep the full symbol sequence (default: only "
                          "for horizons up to 10000)")
    sim.add_argument("--max-colors", type=int,
                     help="abort if the palette exceeds this size")
    sim.add_argument("--transient", type=float,
                     help="smallest time used in the slope fits "
                          "(default sqrt(horizon))")
    sim.add_argument("--rank-floor", type=int,
                     help="smallest count kept in the rank fit (default 5)")
    sim.add_argument("--shift", type=float,
                     help="fixed shift for the shifted rank fit "
                          "(default: the estimated eta)")
    sim.add_argument("--out", metavar="DIR",
                     help="write summary.json plus one trace JSON per "
                          "replication here")
    sim.add_argument("--csv", action="store_true",
                     help="with --out, also write per-trace CSV directories")
    sim.set_defaults(func=cmd_simulate, parser=sim)

    exact_p = sub.add_parser("exact",
                             help="closed forms for the constant-trigger, "
                                  "proportional-weights urn")
    q = exact_p.add_subparsers(dest="quantity", required=True,
                               metavar="QUANTITY")

    def quantity(name: str, help_text: str, parents=(out_flags,)):
        p = q.add_parser(name, parents=list(parents), help=help_text)
        p.set_defaults(func=cmd_exact, parser=p, quantity=name)
        return p

    p = quantity("colors-pmf", "full law of the number of colors")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p = quantity("mean-colors", "mean and variance of the number of colors")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p = quantity("absent", "probability color c never appears by time n")
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--p", type=float)
    p = quantity("expected-count", "expected appearances of color c by time n")
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--p", type=float)
    p = quantity("color1", "expected count of the first color, exact and "
                           "asymptotic")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p = quantity("prefactor", "limit of E[count of color c] / n^(1-p)")
    p.add_argument("--c", type=int)
    p.add_argument("--p", type=float)
    p = quantity("lambda", "the series behind the prefactor, partial or "
                           "to a tolerance")
    p.add_argument("--c", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--upto", type=int, help="sum terms with index <= upto")
    p.add_argument("--tolerance", type=float,
                   help="sum until the tail bound drops below this")
    p = quantity("dynamic-color1", "expected count of color 1 under any "
                                   "trigger schedule",
                 parents=(out_flags, sched_flags))
    p.add_argument("--n", type=int)

    app = sub.add_parser("approx", parents=[out_flags, sched_flags],
                         help="Poisson and normal approximations to the "
                              "number of colors")
    app.add_argument("--n", type=int, help="time horizon")
    app.add_argument("--exact-tv", action="store_true",
                     help="also compute the exact total variation "
                          "(convolution; n up to 100000)")
    app.set_defaults(func=cmd_approx, parser=app)

    ana = sub.add_parser("analyze", parents=[out_flags],
                         help="estimate exponents from a saved trace")
    ana.add_argument("trace", nargs="?",
                     help="trace JSON file written by simulate")
    ana.add_argument("--transient", type=float)
    ana.add_argument("--rank-floor", type=int)
    ana.add_argument("--shift", type=float)
    ana.set_defaults(func=cmd_analyze, parser=ana)

    fit = sub.add_parser("fit", parents=[out_flags],
                         help="estimate exponents from a timestamped "
                              "event log")
    fit.add_argument("events", nargs="?", help="CSV or JSONL event file")
    fit.add_argument("--format", choices=("csv", "jsonl"),
                     help="default: by file extension")
    fit.add_argument("--timestamp-field", help="column/field name "
                                               "(default timestamp)")
    fit.add_argument("--label-field", help="column/field name "
                                           "(default label)")
    fit.add_argument("--delimiter", help="CSV delimiter (default ,)")
    fit.add_argument("--top-m", type=int,
                     help="how many labels to track (default 20)")
    fit.add_argument("--checkpoints-per-decade", type=int)
    fit.add_argument("--transient", type=float)
    fit.add_argument("--rank-floor", type=int)
    fit.add_argument("--shift", type=float)
    fit.set_defaults(func=cmd_fit, parser=fit)

    orc = sub.add_parser("oracle", parents=[out_flags],
                         help="cross-check closed forms against brute-force "
                              "path enumeration")
    orc.add_argument("--n", type=int, help="horizon, 2..8 (default 6)")
    orc.add_argument("--p", type=float, help="trigger probability "
                                             "(default 0.3)")
    orc.add_argument("--tolerance", type=float, help="default 1e-10")
    orc.add_argument("--replications", type=int,
                     help="also check the stochastic engine with this many "
                          "runs")
    orc.add_argument("--seed", type=int)
    orc.set_defaults(func=cmd_oracle, parser=orc)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(func=cmd_serve, parser=srv)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return EXIT_OK
        return code if isinstance(code, int) else EXIT_USAGE
    except OracleMismatch as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (ValidationError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except pydantic.ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input ({exc})", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
