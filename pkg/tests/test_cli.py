import json
import os

import numpy as np
import pytest

from agentsim.cli import build_parser, run_benchmark, run_cli


def test_usage_error_exits_1(capsys):
    assert run_cli(["serve"]) == 1  # missing --env
    assert run_cli(["no-such-command"]) == 1
    assert run_cli([]) == 1


def test_unknown_environment_exits_1(capsys):
    assert run_cli(["benchmark", "--env", "Walker", "--steps", "1"]) == 1
    err = capsys.readouterr().err
    assert "unknown environment" in err


def test_parser_has_all_subcommands():
    parser = build_parser()
    text = parser.format_help()
    for sub in ("serve", "train", "eval", "record", "play", "benchmark"):
        assert sub in text


def test_record_and_eval_roundtrip(tmp_path, capsys, monkeypatch):
    demo_path = str(tmp_path / "basic.agdm")
    assert run_cli(["record", "--env", "Basic", "--episodes", "3",
                    "--record", demo_path, "--seed", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["episodes"] == 3
    assert out["records"] == 24
    assert os.path.isfile(demo_path)

    monkeypatch.setenv("AGENTSIM_LOG_DIR", str(tmp_path / "runs"))
    config = {"env": "Basic", "total_steps": 600, "horizon": 64,
              "eval_episodes": 5, "hidden": [8], "seed": 3}
    config_path = str(tmp_path / "config.json")
    with open(config_path, "w") as fh:
        json.dump(config, fh)
    assert run_cli(["train", "--config", config_path]) == 0
    run_dir = capsys.readouterr().out.strip()
    model = os.path.join(run_dir, "model_Basic.agnn")
    assert os.path.isfile(model)

    assert run_cli(["eval", "--env", "Basic", "--model", model,
                    "--episodes", "5", "--seed", "1"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["env"] == "Basic"
    assert result["episodes"] == 5
    assert np.isfinite(result["mean"])


def test_record_no_expert_exits_2(tmp_path, capsys):
    assert run_cli(["record", "--env", "Tennis", "--episodes", "1",
                    "--record", str(tmp_path / "x.agdm")]) == 2


def test_benchmark_reports_latency(capsys):
    result = run_benchmark("Basic", steps=50, seed=0)
    assert result["env"] == "Basic"
    assert result["num_agents"] == 1
    assert result["obs_type"] == "vector"
    assert result["mean_ms"] > 0
    assert result["std_ms"] >= 0


def test_benchmark_cli_output(capsys):
    assert run_cli(["benchmark", "--env", "Basic", "--steps", "20",
                    "--seed", "0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"env", "obs_type", "num_agents", "mean_ms",
                       "std_ms"}
