"""Tests for the command-line entry point."""

import json
from pathlib import Path

import pytest

from main import EXIT_CONFIG, EXIT_FAILED, EXIT_PASS, main
from plugins.registry import RUN_ORDER


def write_config(directory, document, name="config.json"):
    path = directory / name
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


@pytest.fixture
def born_config(tmp_path):
    return write_config(tmp_path, {"experiment": "born", "parameters": {"sigma": 1.0}, "seed": 4})


class TestValidate:
    def test_valid_config(self, born_config, capsys):
        assert main(["validate", born_config]) == EXIT_PASS
        assert "is valid" in capsys.readouterr().out

    def test_negative_width(self, tmp_path, capsys):
        path = write_config(tmp_path, {"experiment": "born", "parameters": {"sigma": -1.0}})
        assert main(["validate", path]) == EXIT_CONFIG
        assert "/parameters/sigma" in capsys.readouterr().err

    def test_unknown_parameter(self, tmp_path, capsys):
        path = write_config(tmp_path, {"experiment": "spin", "parameters": {"bogus": 1}})
        assert main(["validate", path]) == EXIT_CONFIG
        assert "/parameters/bogus" in capsys.readouterr().err

    def test_unknown_experiment(self, tmp_path, capsys):
        path = write_config(tmp_path, {"experiment": "nope"})
        assert main(["validate", path]) == EXIT_CONFIG
        assert "/experiment" in capsys.readouterr().err

    def test_combined_run_keys_parameters_by_experiment(self, tmp_path, capsys):
        good = write_config(tmp_path, {"experiment": "all", "parameters": {"born": {"sigma": 0.5}}}, "good.json")
        bad = write_config(tmp_path, {"experiment": "all", "parameters": {"nope": {}}}, "bad.json")
        assert main(["validate", good]) == EXIT_PASS
        assert main(["validate", bad]) == EXIT_CONFIG
        assert "/parameters/nope" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{\"experiment\": ", encoding="utf-8")
        assert main(["validate", str(path)]) == EXIT_CONFIG

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "absent.json")]) == EXIT_CONFIG

    def test_bad_log_level(self, born_config, monkeypatch):
        monkeypatch.setenv("HE_LOG_LEVEL", "LOUD")
        assert main(["validate", born_config]) == EXIT_CONFIG


@pytest.mark.parametrize(
    "config_path",
    sorted(p for p in (Path(__file__).parent.parent / "configs").glob("*.json") if p.name != "schema.json"),
    ids=lambda p: p.stem,
)
def test_shipped_configs_validate(config_path):
    assert main(["validate", str(config_path)]) == EXIT_PASS


def test_list(capsys):
    assert main(["list"]) == EXIT_PASS
    out = capsys.readouterr().out
    for experiment_id in RUN_ORDER:
        assert f"({experiment_id})" in out


class TestRun:
    def test_writes_report_and_tables(self, born_config, tmp_path):
        out = tmp_path / "out"
        assert main(["run", born_config, "--out", str(out), "--quiet"]) == EXIT_PASS
        report = json.loads((out / "born" / "report.json").read_text(encoding="utf-8"))
        assert report["seed"] == 4
        assert report["tables"] == ["born/born_sweep.csv"]
        lines = (out / "born" / "born_sweep.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 22
        assert (out / "history.db").exists()

    def test_report_is_reproducible(self, born_config, tmp_path):
        payloads = []
        for name in ("first", "second"):
            out = tmp_path / name
            assert main(["run", born_config, "--out", str(out), "--quiet"]) == EXIT_PASS
            report = json.loads((out / "born" / "report.json").read_text(encoding="utf-8"))
            for key in ("run_id", "started_at", "finished_at"):
                report.pop(key)
            payloads.append(report)
        assert payloads[0] == payloads[1]

    def test_seed_flag_overrides_config(self, born_config, tmp_path):
        out = tmp_path / "out"
        assert main(["run", born_config, "--out", str(out), "--seed", "11", "--quiet"]) == EXIT_PASS
        report = json.loads((out / "born" / "report.json").read_text(encoding="utf-8"))
        assert report["seed"] == 11
        assert report["config"]["seed"] == 11

    def test_global_options_before_the_command(self, born_config, tmp_path):
        out = tmp_path / "out"
        assert main(["--quiet", "--seed", "11", "run", born_config, "--out", str(out)]) == EXIT_PASS
        report = json.loads((out / "born" / "report.json").read_text(encoding="utf-8"))
        assert report["seed"] == 11

    def test_timestamps_carry_utc_offset(self, born_config, tmp_path):
        out = tmp_path / "out"
        assert main(["run", born_config, "--out", str(out), "--quiet"]) == EXIT_PASS
        report = json.loads((out / "born" / "report.json").read_text(encoding="utf-8"))
        for key in ("started_at", "finished_at"):
            assert report[key].endswith(("Z", "+00:00"))

    def test_output_dir_from_environment(self, born_config, tmp_path, monkeypatch):
        monkeypatch.setenv("HE_OUT_DIR", str(tmp_path / "env"))
        assert main(["run", born_config, "--quiet"]) == EXIT_PASS
        assert (tmp_path / "env" / "born" / "report.json").exists()

    def test_failed_check_exit_code(self, tmp_path, capsys):
        path = write_config(tmp_path, {"experiment": "born", "parameters": {"identity_tolerance": 1e-300}})
        assert main(["run", path, "--out", str(tmp_path / "out")]) == EXIT_FAILED
        assert "born_normal_sweep" in capsys.readouterr().out

    def test_history(self, born_config, tmp_path, capsys):
        out = tmp_path / "out"
        main(["run", born_config, "--out", str(out), "--quiet"])
        capsys.readouterr()
        assert main(["history", "--out", str(out)]) == EXIT_PASS
        assert "born" in capsys.readouterr().out
        assert main(["history", "--out", str(out), "--check", "born_identical"]) == EXIT_PASS
        assert "born_identical" in capsys.readouterr().out
