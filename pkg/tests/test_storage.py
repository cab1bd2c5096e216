"""Tests for the run history and result artifacts."""

import asyncio
import csv
import json
import math
from datetime import timedelta

import pytest

from core.schemas import CheckResult, ExperimentResult, Report, Table
from storage.artifacts import ArtifactWriter
from storage.database import RunDatabase


def make_report(experiment: str = "born", passed: bool = True, value: float = 1e-12) -> Report:
    checks = [
        CheckResult.below("born_normal_sweep", value, 1e-8),
        CheckResult.holds("born_identical", passed),
    ]
    result = ExperimentResult(
        experiment_id=experiment,
        checks=checks,
        data={"max_gap": value},
        tables=[Table(name="born_sweep", columns=["separation", "gap"], rows=[[0.0, 0.0], [0.5, 1e-15]])],
    )
    return Report(experiment=experiment, version="test", config={"experiment": experiment}, seed=7, results=[result])


class TestRunDatabase:
    def test_save_and_list(self, tmp_path):
        async def scenario():
            db = RunDatabase(str(tmp_path / "history.db"))
            await db.initialize()
            await db.initialize()
            await db.save_run(make_report())
            await db.save_run(make_report(passed=False))
            await db.save_run(make_report(experiment="spin"))
            return await db.list_runs(), await db.list_runs("born")

        runs, born_runs = asyncio.run(scenario())
        assert len(runs) == 3
        assert len(born_runs) == 2
        assert sorted(run.n_failed for run in born_runs) == [0, 1]
        assert all(run.n_checks == 2 for run in runs)

    def test_get_run(self, tmp_path):
        report = make_report()

        async def scenario():
            db = RunDatabase(str(tmp_path / "history.db"))
            await db.initialize()
            await db.save_run(report)
            return await db.get_run(report.run_id)

        stored = asyncio.run(scenario())
        assert stored.run_id == report.run_id
        assert stored.seed == 7
        assert stored.passed
        assert stored.started_at.utcoffset() == timedelta(0)

    def test_check_history_keeps_non_finite_values(self, tmp_path):
        async def scenario():
            db = RunDatabase(str(tmp_path / "history.db"))
            await db.initialize()
            await db.save_run(make_report(value=float("nan")))
            return await db.get_check_history("born_normal_sweep")

        history = asyncio.run(scenario())
        assert len(history) == 1
        assert math.isinf(history[0].value)
        assert not history[0].passed


class TestArtifactWriter:
    def test_write_table(self, tmp_path):
        writer = ArtifactWriter(tmp_path)
        table = Table(name="born_sweep", columns=["separation", "gap"], rows=[[0.0, 0.0], [0.5, 1e-15]])
        relative = writer.write_table("born", table)
        assert relative.as_posix() == "born/born_sweep.csv"
        content = (tmp_path / relative).read_bytes()
        assert b"\r\n" not in content
        rows = list(csv.reader(content.decode("utf-8").splitlines()))
        assert rows[0] == ["separation", "gap"]
        assert float(rows[2][1]) == pytest.approx(1e-15)

    def test_combined_run_uses_subdirectories(self, tmp_path):
        report = make_report(experiment="all")
        tables = {"born": report.results[0].tables, "spin": [Table(name="geodesic_residuals", columns=["state"], rows=[[0.0]])]}
        paths = ArtifactWriter(tmp_path).write_tables(report, tables)
        assert paths == ["all/born/born_sweep.csv", "all/spin/geodesic_residuals.csv"]
        assert report.tables == paths

    def test_write_report(self, tmp_path):
        report = make_report()
        path = ArtifactWriter(tmp_path).write_report(report)
        assert path == tmp_path / "born" / "report.json"
        document = json.loads(path.read_text(encoding="utf-8"))
        assert document["seed"] == 7
        assert document["results"][0]["checks"][0]["name"] == "born_normal_sweep"
        assert "tables" not in document["results"][0]
        assert not list(tmp_path.glob("born/*.tmp"))
