"""
Result artifacts for Hilbert Embedding Lab.

Writes report.json and plot-ready CSV tables under
<output_dir>/<experiment>/.
"""

import csv
import json
import logging
import os
from pathlib import Path

from core.schemas import Report, Table


logger = logging.getLogger(__name__)


class ArtifactWriter:
    """
    Writer for the files of one output directory.

    CSV files have a header row, '.' decimals and LF line endings; the
    report is UTF-8 JSON with two-space indentation.
    """

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)

    def run_dir(self, experiment: str) -> Path:
        return self.output_dir / experiment

    def write_table(self, experiment: str, table: Table, subdir: str = "") -> Path:
        """
        Write one table as CSV.

        Returns:
            Path of the file relative to the output directory
        """
        relative = Path(experiment, subdir, f"{table.name}.csv") if subdir else Path(experiment, f"{table.name}.csv")
        path = self.output_dir / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(table.columns)
            writer.writerows(table.rows)
        logger.debug("Wrote %d rows to %s", len(table.rows), path)
        return relative

    def write_tables(self, report: Report, tables: dict[str, list[Table]]) -> list[str]:
        """
        Write every experiment's tables and record their paths on the report.

        For the combined `all` run each experiment gets its own subdirectory.
        """
        paths = []
        for experiment_id, experiment_tables in tables.items():
            subdir = experiment_id if experiment_id != report.experiment else ""
            for table in experiment_tables:
                paths.append(self.write_table(report.experiment, table, subdir).as_posix())
        report.tables = paths
        return paths

    def write_report(self, report: Report) -> Path:
        """Write report.json atomically and return its path."""
        path = self.run_dir(report.experiment) / "report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"
        tmp_path = path.with_suffix(".json.tmp")
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_path, path)
        logger.info("Report written: %s", path)
        return path
