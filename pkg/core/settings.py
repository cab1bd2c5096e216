"""
Environment settings for Hilbert Embedding Lab.

Values come from HE_* environment variables; CLI flags override them.
"""

import logging
import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, field_validator


DEFAULT_OUT_DIR = "results"


class HarnessSettings(BaseModel):
    """
    Process-wide settings for the experiment harness.

    Attributes:
        out_dir: Output directory override (HE_OUT_DIR)
        db_path: Run-history database (HE_DB_PATH)
        log_level: Root logging level name (HE_LOG_LEVEL)
    """
    out_dir: Optional[str] = Field(
        default=None,
        description="Overrides ExperimentConfig.output_dir when set"
    )
    db_path: Optional[str] = Field(
        default=None,
        description="SQLite history path; defaults to <output_dir>/history.db"
    )
    log_level: str = Field(default="INFO", description="Logging level name")

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level '{value}'")
        return value

    @classmethod
    def from_env(cls) -> "HarnessSettings":
        """Read settings from the environment."""
        return cls(
            out_dir=os.environ.get("HE_OUT_DIR") or None,
            db_path=os.environ.get("HE_DB_PATH") or None,
            log_level=os.environ.get("HE_LOG_LEVEL", "INFO"),
        )

    def resolve_output_dir(
        self,
        cli_out: Optional[str] = None,
        config_out: Optional[str] = None
    ) -> Path:
        """
        Pick the output directory.

        Precedence: --out flag, HE_OUT_DIR, config output_dir, default.
        """
        return Path(cli_out or self.out_dir or config_out or DEFAULT_OUT_DIR)

    def resolve_db_path(self, output_dir: Path) -> Path:
        if self.db_path:
            return Path(self.db_path)
        return output_dir / "history.db"
