"""
Storage layer for Hilbert Embedding Lab.

Keeps an append-only history of runs and their checks.
Uses SQLite with async support via aiosqlite.
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Optional
from uuid import UUID

import aiosqlite

from core.schemas import CheckResult, Report, RunSummary


logger = logging.getLogger(__name__)


class RunDatabase:
    """
    Async SQLite run history.

    Handles schema creation and provides data access methods for:
    - Runs (one row per report, append-only)
    - Check results (one row per check of a run)
    """

    def __init__(self, db_path: str = "results/history.db"):
        """
        Initialize database manager.

        Args:
            db_path: Path to SQLite database file
        """
        self.db_path = str(db_path)
        self._initialized = False

    async def initialize(self) -> None:
        """
        Initialize database schema.

        Creates tables if they don't exist. Safe to call multiple times.
        """
        if self._initialized:
            return

        Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)

        async with aiosqlite.connect(self.db_path) as db:
            await db.execute("PRAGMA foreign_keys = ON")

            await db.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    run_id TEXT PRIMARY KEY,
                    experiment TEXT NOT NULL,
                    version TEXT NOT NULL,
                    seed INTEGER NOT NULL,
                    config TEXT NOT NULL,
                    passed INTEGER NOT NULL,
                    n_checks INTEGER NOT NULL,
                    n_failed INTEGER NOT NULL,
                    started_at TEXT NOT NULL,
                    finished_at TEXT
                )
            """)

            await db.execute("""
                CREATE TABLE IF NOT EXISTS check_results (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_id TEXT NOT NULL,
                    experiment_id TEXT NOT NULL,
                    name TEXT NOT NULL,
                    value REAL NOT NULL,
                    target REAL,
                    tolerance REAL,
                    passed INTEGER NOT NULL,
                    description TEXT NOT NULL,
                    FOREIGN KEY (run_id) REFERENCES runs (run_id)
                        ON DELETE CASCADE
                )
            """)

            await db.execute("""
                CREATE INDEX IF NOT EXISTS idx_checks_name
                ON check_results (name, run_id)
            """)

            await db.commit()

        self._initialized = True
        logger.debug("Run history initialized: %s", self.db_path)

    async def save_run(self, report: Report) -> None:
        """
        Save a finished run with all of its checks.

        Runs are append-only and immutable.
        """
        checks = [
            (result.experiment_id, check)
            for result in report.results
            for check in result.checks
        ]
        n_failed = sum(1 for _, check in checks if not check.passed)
        async with aiosqlite.connect(self.db_path) as db:
            await db.execute("""
                INSERT INTO runs (
                    run_id, experiment, version, seed, config, passed,
                    n_checks, n_failed, started_at, finished_at
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """, (
                str(report.run_id),
                report.experiment,
                report.version,
                report.seed,
                json.dumps(report.config),
                1 if report.passed else 0,
                len(checks),
                n_failed,
                report.started_at.isoformat(),
                report.finished_at.isoformat() if report.finished_at else None
            ))
            await db.executemany("""
                INSERT INTO check_results (
                    run_id, experiment_id, name, value, target, tolerance,
                    passed, description
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?)
            """, [
                (
                    str(report.run_id),
                    experiment_id,
                    check.name,
                    _storable(check.value),
                    check.target,
                    check.tolerance,
                    1 if check.passed else 0,
                    check.description
                )
                for experiment_id, check in checks
            ])
            await db.commit()

    async def list_runs(
        self,
        experiment: Optional[str] = None,
        limit: int = 50
    ) -> list[RunSummary]:
        """
        List recent runs.

        Args:
            experiment: If given, only runs of this experiment
            limit: Maximum number of runs to return

        Returns:
            List of RunSummary objects, newest first
        """
        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row

            query = "SELECT * FROM runs"
            args: tuple = ()
            if experiment:
                query += " WHERE experiment = ?"
                args = (experiment,)
            query += " ORDER BY started_at DESC LIMIT ?"

            cursor = await db.execute(query, args + (limit,))
            rows = await cursor.fetchall()

            return [self._row_to_summary(row) for row in rows]

    async def get_run(self, run_id: UUID) -> Optional[RunSummary]:
        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row
            cursor = await db.execute("""
                SELECT * FROM runs WHERE run_id = ?
            """, (str(run_id),))
            row = await cursor.fetchone()

            if row:
                return self._row_to_summary(row)
            return None

    async def get_check_history(self, name: str, limit: int = 50) -> list[CheckResult]:
        """
        Get recent values of one named check across runs.

        Returns:
            List of CheckResult objects, newest first
        """
        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row
            cursor = await db.execute("""
                SELECT cr.* FROM check_results cr
                INNER JOIN runs r ON cr.run_id = r.run_id
                WHERE cr.name = ?
                ORDER BY r.started_at DESC, cr.id DESC
                LIMIT ?
            """, (name, limit))
            rows = await cursor.fetchall()

            return [self._row_to_check(row) for row in rows]

    # Helper methods

    def _row_to_summary(self, row: aiosqlite.Row) -> RunSummary:
        """Convert database row to RunSummary."""
        return RunSummary(
            run_id=UUID(row["run_id"]),
            experiment=row["experiment"],
            version=row["version"],
            seed=row["seed"],
            passed=bool(row["passed"]),
            n_checks=row["n_checks"],
            n_failed=row["n_failed"],
            started_at=datetime.fromisoformat(row["started_at"])
        )

    def _row_to_check(self, row: aiosqlite.Row) -> CheckResult:
        """Convert database row to CheckResult."""
        return CheckResult(
            name=row["name"],
            value=row["value"],
            target=row["target"],
            tolerance=row["tolerance"],
            passed=bool(row["passed"]),
            description=row["description"]
        )


def _storable(value: float) -> float:
    # sqlite3 stores NaN as NULL
    return value if value == value else float("inf")
