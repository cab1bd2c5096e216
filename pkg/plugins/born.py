"""
Born rule experiment for Hilbert Embedding Lab.

On Gaussian delta states the Born probability cos²ρ equals the normal
law e^{-(a-b)²/2σ²}; the density |δ̃_a(b)|² is the normal density.
"""

import math
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from core.born_collapse import (
    DEFAULT_GRID,
    born_normal_identity,
    born_probability,
    born_sweep,
    normal_density_check,
)
from core.grid import hermite_function, make_tilde_delta
from core.schemas import (
    CheckResult,
    ExperimentCategory,
    ExperimentDefinition,
    ExperimentResult,
)
from plugins.base import ExperimentBase


class BornParams(BaseModel):
    """Parameters of the Born rule experiment."""
    sigma: float = Field(default=1.0, ge=0.1, le=2.0, description="Width of the delta states")
    sweep_points: int = Field(default=21, ge=2, le=1001, description="Separations in the sweep")
    reach: float = Field(default=4.0, gt=0.0, description="Largest separation in units of σ")
    identity_tolerance: float = Field(default=1e-8, gt=0.0)

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def _check_reach(self) -> "BornParams":
        # δ̃_b needs 5σ of grid beyond the largest separation
        if (self.reach + 5.0) * self.sigma > DEFAULT_GRID.hi[0]:
            raise ValueError(f"reach·σ + 5σ must stay within {DEFAULT_GRID.hi[0]:g}")
        return self


class BornExperiment(ExperimentBase):
    """
    Experiment for the Born rule on the Gaussian manifold.

    Checks:
    - e^{-(a-b)²/2σ²} = cos²ρ(δ̃_a, δ̃_b) across a sweep of separations
    - probability 1/2 at |a-b| = σ√(2 ln 2), 1 for equal and 0 for orthogonal states
    - |δ̃_a(b)|² equals the normal density in one and three dimensions
    """

    Params = BornParams

    def get_definition(self) -> ExperimentDefinition:
        return ExperimentDefinition(
            experiment_id="born",
            experiment_version="1.0.0",
            display_name="Born Rule",
            description="Born probabilities of Gaussian delta states against the normal law.",
            category=ExperimentCategory.QUANTUM,
            config_schema=BornParams.model_json_schema(),
        )

    def run(
        self,
        params: BornParams,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        sigma = params.sigma
        checks: list[CheckResult] = []

        table = born_sweep(sigma, params.sweep_points, params.reach, DEFAULT_GRID)
        worst = max(row[3] for row in table.rows)
        checks.append(CheckResult.below(
            "born_normal_sweep", worst, params.identity_tolerance,
            f"max gap over {params.sweep_points} separations in [0, {params.reach}σ]"
        ))

        _, far, _ = born_normal_identity(sigma, 0.0, 2.0 * sigma, DEFAULT_GRID)
        checks.append(CheckResult.within("born_two_sigma", far, math.exp(-2.0), 1e-12))

        half = sigma * math.sqrt(2.0 * math.log(2.0))
        origin = make_tilde_delta(0.0, sigma, DEFAULT_GRID)
        probability = born_probability(origin, make_tilde_delta(half, sigma, DEFAULT_GRID))
        checks.append(CheckResult.within("born_half_probability", probability, 0.5, 1e-8))
        checks.append(CheckResult.within("born_identical", born_probability(origin, origin), 1.0, 1e-10))
        excited = hermite_function(DEFAULT_GRID, 1, 0.0, sigma)
        checks.append(CheckResult.within("born_orthogonal", born_probability(origin, excited), 0.0, 1e-10))

        density_gap = 0.0
        for a, b in ((0.0, 0.0), (0.0, sigma), (1.5, -0.5), ([0.0, 1.0, -1.0], [0.5, 0.0, 0.25])):
            density, reference = normal_density_check(sigma, a, b)
            density_gap = max(density_gap, abs(density - reference) / reference)
        checks.append(CheckResult.below("normal_density", density_gap, 1e-12))
        peak, _ = normal_density_check(sigma, 0.0, 0.0)
        checks.append(CheckResult.within("normal_density_peak", peak, 1.0 / math.sqrt(math.pi * sigma**2), 1e-15))

        return ExperimentResult(
            experiment_id="born",
            checks=checks,
            data={"max_gap": worst, "half_probability_separation": half},
            tables=[table],
        )
