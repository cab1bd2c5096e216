"""
Experiment base interface for Hilbert Embedding Lab.

All experiments must implement this interface to be runnable by the
harness.
"""

from abc import ABC, abstractmethod
from typing import Any, Optional

from pydantic import BaseModel, ValidationError

from core.exceptions import config_error_from_validation
from core.schemas import ExperimentDefinition, ExperimentResult


class ExperimentBase(ABC):
    """
    Base class for all experiments.

    Experiments define:
    1. Their identity and parameter schema (get_definition)
    2. How to turn validated parameters into checks, data and tables (run)

    Each experiment class declares a pydantic Params model; its JSON schema
    is the experiment's config_schema and unknown keys are rejected.
    """

    Params: type[BaseModel]

    @abstractmethod
    def get_definition(self) -> ExperimentDefinition:
        """
        Return the experiment definition metadata.

        Called once at registration.

        Returns:
            ExperimentDefinition with complete metadata
        """
        pass

    @abstractmethod
    def run(
        self,
        params: BaseModel,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        """
        Execute the experiment.

        Args:
            params: Validated instance of the experiment's Params model
            seed: Seed for every random draw of the run
            parallel_trials: Worker processes for trial-level parallelism,
                honoured only by experiments with independent trials

        Returns:
            ExperimentResult with explicit pass/fail checks

        Raises:
            NumericError: Propagated from the numerical modules
        """
        pass

    def parse_params(self, parameters: dict[str, Any], prefix: str = "/parameters") -> BaseModel:
        """
        Validate a parameters dict against the Params model.

        Raises:
            ConfigError: With a JSON pointer to the first offending key
        """
        try:
            return self.Params.model_validate(parameters)
        except ValidationError as e:
            raise config_error_from_validation(e, prefix) from e

    def validate_config(self, config: dict[str, Any]) -> tuple[bool, str]:
        """
        Validate that a parameters dict matches the experiment's schema.

        Returns:
            Tuple of (is_valid, error_message)
        """
        try:
            self.parse_params(config)
        except Exception as e:
            return False, str(e)
        return True, "Configuration is valid"

    def schema(self) -> dict[str, Any]:
        return self.Params.model_json_schema()
