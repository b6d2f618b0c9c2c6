"""Command-line behavior: exit codes, outputs, config round trips."""

import json

import pytest

from urnkit import Constant, Linear, simulate
from urnkit.cli import main
from urnkit.urn_core import SimulationConfig, Trace


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_timestamp(text: str) -> str:
    return "\n".join(line for line in text.splitlines()
                     if "generated_at" not in line)


# ---------------------------------------------------------------------------
# Exit codes


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "simulate")[0] == 1
    assert run(capsys, "no-such-command")[0] == 1
    assert run(capsys, "simulate", "--p", "0.3")[0] == 1     # no horizon
    assert run(capsys, "exact", "lambda", "--c", "2", "--p", "0.5")[0] == 1
    code, _, err = run(capsys, "approx", "--n", "10",
                       "--probs", "a,b", "--schedule", "explicit")
    assert code == 1
    assert "comma-separated" in err


def test_validation_errors_exit_2(capsys):
    code, _, err = run(capsys, "exact", "colors-pmf", "--n", "5", "--p", "1.5")
    assert code == 2
    assert "error:" in err
    assert run(capsys, "exact", "expected-count",
               "--n", "2", "--c", "5", "--p", "0.5")[0] == 2
    assert run(capsys, "approx", "--p", "0.3", "--n", "10",
               "--config", "/nonexistent.json")[0] == 2


def test_oracle_pass_and_fail_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "oracle", "--n", "5", "--p", "0.3")
    assert code == 0
    assert "oracle PASS" in out

    code, out, err = run(capsys, "oracle", "--n", "5", "--p", "0.3",
                         "--tolerance", "1e-18")
    assert code == 3
    assert "oracle failure" in err
    assert "FAIL" in out


def test_version_exits_cleanly(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0
    assert out.startswith("urnkit ")


# ---------------------------------------------------------------------------
# Output modes


def test_exact_json_output(capsys):
    code, out, _ = run(capsys, "exact", "mean-colors",
                       "--n", "101", "--p", "0.3", "--json")
    assert code == 0
    body = json.loads(out)
    assert body["value"]["mean"] == pytest.approx(31.0)


def test_exact_human_output(capsys):
    code, out, _ = run(capsys, "exact", "mean-colors",
                       "--n", "101", "--p", "0.3")
    assert code == 0
    assert "mean" in out
    assert "31" in out


def test_exact_long_lists_are_truncated(capsys):
    _, out, _ = run(capsys, "exact", "colors-pmf", "--n", "200", "--p", "0.5")
    assert "more entries" in out


def test_artifact_file_and_config_round_trip(capsys, tmp_path):
    artifact = tmp_path / "prefactor.json"
    code, _, _ = run(capsys, "exact", "prefactor", "--c", "2", "--p", "0.5",
                     "--output", str(artifact))
    assert code == 0
    doc = json.loads(artifact.read_text())
    assert doc["artifact"]["tool"] == "urnkit"
    assert doc["config"]["quantity"] == "prefactor"
    assert doc["result"]["value"] == pytest.approx(0.6440746838100035,
                                                   rel=1e-12)

    # re-running the emitted artifact as config reproduces it exactly,
    # except for the timestamp line
    again = tmp_path / "again.json"
    code, _, _ = run(capsys, "exact", "prefactor",
                     "--config", str(artifact), "--output", str(again))
    assert code == 0
    assert strip_timestamp(again.read_text()) == \
        strip_timestamp(artifact.read_text())


def test_config_file_with_flag_overrides(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "schedule": {"kind": "constant", "p": 0.3},
        "update": {"kind": "linear", "rho": 1.0, "rho_tilde": 0.0},
        "horizon": 800, "seed": 1}))
    code, out, _ = run(capsys, "simulate", "--config", str(cfg),
                       "--seed", "5", "--json")
    assert code == 0
    body = json.loads(out)
    assert body["horizon"] == 800
    assert body["seed"] == 5


# ---------------------------------------------------------------------------
# simulate artifacts


def test_simulate_writes_deterministic_artifacts(capsys, tmp_path):
    args = ("simulate", "--p", "0.3", "--horizon", "1500",
            "--replications", "2", "--seed", "9")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, *args, "--out", str(out_a))[0] == 0
    assert run(capsys, *args, "--out", str(out_b))[0] == 0

    for name in ("trace_0000.json", "trace_0001.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    assert strip_timestamp((out_a / "summary.json").read_text()) == \
        strip_timestamp((out_b / "summary.json").read_text())

    trace = Trace.from_json((out_a / "trace_0000.json").read_text())
    assert trace.horizon == 1500
    summary = json.loads((out_a / "summary.json").read_text())
    assert summary["result"]["traces"] is None
    assert summary["config"]["schedule"]["p"] == 0.3


def test_simulate_thread_count_is_invisible(capsys):
    base = ("simulate", "--p", "0.3", "--horizon", "1200",
            "--replications", "2", "--seed", "4", "--json")
    _, out1, _ = run(capsys, *base, "--threads", "1")
    _, out2, _ = run(capsys, *base, "--threads", "2")
    assert out1 == out2


def test_simulate_csv_directories(capsys, tmp_path):
    out = tmp_path / "runs"
    code, _, _ = run(capsys, "simulate", "--p", "0.4", "--horizon", "600",
                     "--seed", "2", "--out", str(out), "--csv")
    assert code == 0
    assert (out / "trace_0000" / "colors.csv").exists()
    assert (out / "trace_0000" / "final_counts.csv").exists()


def test_simulate_human_table(capsys):
    code, out, _ = run(capsys, "simulate", "--p", "0.3",
                       "--horizon", "2000", "--seed", "1")
    assert code == 0
    assert "C slope" in out
    assert "predicted" in out
    assert "regime" in out


# ---------------------------------------------------------------------------
# exact dynamic-color1 and approx


def test_dynamic_color1_harmonic(capsys):
    code, out, _ = run(capsys, "exact", "dynamic-color1",
                       "--schedule", "harmonic", "--n", "100", "--json")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(50.5, rel=1e-12)


def test_approx_with_explicit_probs(capsys):
    code, out, _ = run(capsys, "approx", "--schedule", "explicit",
                       "--probs", "0.5,0.25,0.125", "--n", "3", "--json")
    assert code == 0
    assert json.loads(out)["lambda1"] == pytest.approx(1.75, rel=1e-12)


def test_approx_human_output(capsys):
    code, out, _ = run(capsys, "approx", "--p", "0.3", "--n", "1000",
                       "--exact-tv")
    assert code == 0
    assert "tv bound" in out
    assert "tv exact" in out


# ---------------------------------------------------------------------------
# analyze and fit


@pytest.fixture(scope="module")
def saved_trace(tmp_path_factory):
    path = tmp_path_factory.mktemp("traces") / "trace.json"
    config = SimulationConfig(schedule=Constant(0.3), update=Linear(1.0, 0.0),
                              horizon=20_000, seed=8)
    simulate(config).write_json(path)
    return path


def test_analyze_saved_trace(capsys, saved_trace):
    code, out, _ = run(capsys, "analyze", str(saved_trace), "--json")
    assert code == 0
    body = json.loads(out)
    assert abs(body["estimates"]["theta_hat"] - 1.0) < 0.1
    assert body["prediction"]["kind"] == "constant_p"


def test_analyze_human_output(capsys, saved_trace):
    code, out, _ = run(capsys, "analyze", str(saved_trace))
    assert code == 0
    assert "theta^" in out
    assert "dominance" in out


def test_analyze_requires_a_trace(capsys):
    assert run(capsys, "analyze")[0] == 1


@pytest.fixture(scope="module")
def event_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("events") / "events.csv"
    config = SimulationConfig(schedule=Constant(0.25), update=Linear(1.0, 0.0),
                              horizon=4000, seed=33, capture_history=True)
    history = simulate(config).history
    path.write_text("timestamp,label\n" + "".join(
        f"{t},q{s}\n" for t, s in enumerate(history, 1)))
    return path


def test_fit_event_file(capsys, event_file):
    code, out, _ = run(capsys, "fit", str(event_file), "--json")
    assert code == 0
    body = json.loads(out)
    assert body["num_events"] == 4000
    assert body["top_labels"][0] == "q1"


def test_fit_human_output(capsys, event_file):
    code, out, _ = run(capsys, "fit", str(event_file))
    assert code == 0
    assert "events      4000" in out
    assert "top labels" in out


def test_fit_too_small_is_validation_error(capsys, tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text("timestamp,label\n1,a\n2,b\n")
    assert run(capsys, "fit", str(path))[0] == 2
