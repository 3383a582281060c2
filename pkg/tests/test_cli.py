import json
import os

import pytest

from qpomdp.cli import main


def test_version(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["--version"])
    assert exit_info.value.code == 0


def test_sweep_subcommand(tmp_path, capsys):
    code = main([
        "sweep-pe", "--grid", "1.0,0.25", "--accepted", "40",
        "--seed", "5", "--out", str(tmp_path),
    ])
    assert code == 0
    lines = (tmp_path / "pe_sweep.csv").read_text().splitlines()
    assert lines[0].startswith("# schema=")
    assert len(lines) == 2 + 4


def test_reward_subcommand_small(tmp_path):
    code = main([
        "reward", "--env", "tiger", "--steps", "3", "--runs", "2",
        "--samples", "4", "--reward-samples", "8", "--obs-samples", "8",
        "--seed", "1", "--out", str(tmp_path), "--workers", "1",
    ])
    assert code == 0
    assert (tmp_path / "reward_runs.csv").exists()
    assert (tmp_path / "reward_summary.csv").exists()
    meta = json.loads((tmp_path / "reward.meta.json").read_text())
    assert meta["config"]["env"] == "tiger"
    assert meta["config"]["seed"] == 1


def test_cost_subcommand_small(tmp_path):
    code = main([
        "cost", "--env", "tiger", "--steps", "3", "--runs", "2",
        "--samples", "2", "--reward-samples", "8", "--obs-samples", "8",
        "--out", str(tmp_path), "--workers", "1",
    ])
    assert code == 0
    rows = (tmp_path / "cost_runs.csv").read_text().splitlines()[2:]
    for row in rows:
        assert float(row.split(",")[-1]) <= 1e-9


def test_cost_vs_reward_subcommand_small(tmp_path):
    code = main([
        "cost-vs-reward", "--env", "tiger", "--steps", "3", "--runs", "3",
        "--samples", "4", "--reward-samples", "8", "--obs-samples", "8",
        "--bins", "2", "--out", str(tmp_path), "--workers", "1",
    ])
    assert code == 0
    assert (tmp_path / "cvr_points.csv").exists()
    assert (tmp_path / "cvr_binned.csv").exists()


def test_file_env_loads(tmp_path):
    import qpomdp

    model_path = os.path.join(qpomdp.__path__[0], "models", "tiger.pomdp")
    code = main([
        "reward", "--env", f"file:{model_path}", "--steps", "2", "--runs", "1",
        "--samples", "2", "--reward-samples", "4", "--obs-samples", "4",
        "--out", str(tmp_path), "--workers", "1",
    ])
    assert code == 0


def test_pac_subcommand(capsys):
    code = main([
        "pac", "--env", "tiger", "--epsilon", "20", "--delta", "0.1",
        "--steps", "5", "--horizon", "2", "--rmax", "1",
        "--budget-from", "100",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "min_horizon" in out
    assert "observation=8100" in out
    assert "belief=11472" in out


def test_validate_subcommand(capsys):
    assert main(["validate", "--env", "tiger"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
