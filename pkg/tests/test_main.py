import json
import numpy as np
import pandas as pd
import pytest

from segsignal import DesignKind, NoiseSpec, Sample, Segment, data_streams, estimate_segment_lse, make_design, sample_observations
from segsignal.main import dispatch


@pytest.fixture()
def simulated(tmp_path) -> str:
    path = str(tmp_path / "s.csv")
    assert dispatch(["simulate", "--design", "dd", "--n", "4", "--segment", "0,0.5",
                     "--noise", "gaussian:0", "--seed", "1", "--out", path]) == 0
    return path


def test_simulate_writes_sample(simulated) -> None:
    frame = pd.read_csv(simulated)
    assert list(frame.columns) == ["i", "x", "y"]
    assert frame["i"].tolist() == [1, 2, 3, 4]
    assert frame["y"].tolist() == [1, 1, 0, 0]


def test_estimate_prints_json(simulated, capsys) -> None:
    assert dispatch(["estimate", "--method", "lse", "--in", simulated, "--json"]) == 0
    result = strict_json(capsys.readouterr().out)
    assert (result["a"], result["b"], result["empty"]) == (0.25, 0.5, False)
    assert result["indices"] == {"k": 1, "l": 2}


def strict_json(text : str):
    def reject(token):
        raise ValueError(f"non standard json token {token}")
    return json.loads(text, parse_constant=reject)


def test_detect_without_admissible_window(simulated, capsys) -> None:
    assert dispatch(["detect", "--test", "scan", "--h", "0.9", "--in", simulated, "--json"]) == 0
    outcome = strict_json(capsys.readouterr().out)
    assert outcome["statistic"] is None
    assert outcome["decision"] == 0
    assert outcome["aux"]["no_admissible_window"]


def test_round_trip_matches_in_process(tmp_path, capsys) -> None:
    path = str(tmp_path / "rd.csv")
    assert dispatch(["simulate", "--design", "rd", "--n", "200", "--segment", "0.3,0.45",
                     "--noise", "rademacher:0.8", "--seed", "31", "--out", path]) == 0
    capsys.readouterr()
    assert dispatch(["estimate", "--method", "lse", "--in", path, "--json"]) == 0
    from_file = json.loads(capsys.readouterr().out)

    design_rng, noise_rng = data_streams(31)
    x        = make_design(DesignKind.RD, 200, design_rng)
    sample   = sample_observations(x, Segment(0.3, 0.45), NoiseSpec.parse("rademacher:0.8"), noise_rng)
    expected = estimate_segment_lse(sample).to_dict()
    assert from_file == json.loads(json.dumps(expected))


def test_usage_errors(tmp_path) -> None:
    assert dispatch([]) == 2
    assert dispatch(["estimate", "--method", "lse"]) == 2
    assert dispatch(["estimate", "--method", "lse", "--in", "s.csv", "--bogus"]) == 2
    assert dispatch(["estimate", "--method", "two-step", "--in", "s.csv"]) == 2
    assert dispatch(["simulate", "--design", "xx", "--n", "4", "--segment", "empty",
                     "--noise", "gaussian:1", "--seed", "1", "--out", str(tmp_path / "x.csv")]) == 2


def test_runtime_failures(tmp_path) -> None:
    assert dispatch(["estimate", "--method", "lse", "--in", str(tmp_path / "missing.csv")]) == 1
    assert dispatch(["estimate", "--method", "two-step", "--mu", "0.2", "--in", str(tmp_path / "missing.csv")]) == 1
    assert dispatch(["simulate", "--design", "dd", "--n", "0", "--segment", "empty",
                     "--noise", "gaussian:1", "--seed", "1", "--out", str(tmp_path / "x.csv")]) == 1


def test_sweep_and_rates(tmp_path, capsys) -> None:
    config = tmp_path / "risk.json"
    config.write_text(json.dumps({"master_seed": 3, "design": "dd", "noise": "gaussian:0.5", "n_grid": [16, 64, 256],
                                  "reps": 100, "task": "risk", "method": "one-cp", "family": {"name": "s0_grid"}}))
    report = str(tmp_path / "risk.csv")
    assert dispatch(["risk-sweep", "--config", str(config), "--out", report, "--workers", "2"]) == 0
    frame = pd.read_csv(report)
    assert frame["max_over_family"].sum() == 3
    capsys.readouterr()

    assert dispatch(["rates", "--in", report, "--json"]) == 0
    fits = json.loads(capsys.readouterr().out)
    assert set(fits) == {"one-cp"}
    assert fits["one-cp"]["n_points"] == 3
    assert fits["one-cp"]["slope"] < 0

    assert dispatch(["tail", "--config", str(config), "--out", str(tmp_path / "tail.csv")]) == 1


def test_detection_sweep(tmp_path) -> None:
    config = tmp_path / "detection.json"
    config.write_text(json.dumps({"master_seed": 3, "design": "dd", "noise": "gaussian:0", "n_grid": [64, 128],
                                  "reps": 10, "task": "detection", "method": "counting", "h": {"scale": 1, "power": -0.5},
                                  "family": {"name": "s_short", "lengths": [{"scale": 1, "power": -0.5}], "positions": [0.0]}}))
    out = tmp_path / "detection.csv"
    assert dispatch(["detect-sweep", "--config", str(config), "--out", str(out)]) == 0
    assert (pd.read_csv(out)["gamma_hat"] == 0).all()


def test_adversarial_sweep_logs_bounds(tmp_path, capsys) -> None:
    config = tmp_path / "pair.json"
    config.write_text(json.dumps({"master_seed": 5, "design": "rd", "noise": "gaussian:0.5", "n_grid": [16],
                                  "reps": 50, "task": "risk", "method": "one-cp", "family": {"name": "adversarial_pair"}}))
    assert dispatch(["risk-sweep", "--config", str(config), "--out", str(tmp_path / "pair.csv")]) == 0
    err = capsys.readouterr().err
    assert "lower bound 0.007812 on the risk" in err
    assert "against the floor" in err
    assert "moment 1 risk" in err
