"""
Diffusion collapse experiment for Hilbert Embedding Lab.

Isotropic random walks on CP¹ absorbed on two orthogonal states: symmetry,
unitary invariance and monotonicity of the hit frequencies in the
Fubini-Study distance. The comparison with cos²ρ is reported as data.
"""

import math
from typing import Optional

from pydantic import BaseModel, Field, model_validator
from scipy.stats import unitary_group

from core.born_collapse import (
    DEFAULT_GRID,
    ProjectivePoint,
    diffuse_walk,
    manifold_targets,
)
from core.schemas import (
    CheckResult,
    ExperimentCategory,
    ExperimentDefinition,
    ExperimentResult,
    HitReport,
    Table,
    WalkConfig,
)
from plugins.base import ExperimentBase


HIT_COLUMNS = [
    "start_probability", "target", "fs_distance", "hits", "trials",
    "frequency", "ci_low", "ci_high", "born_reference",
]


class DiffuseParams(BaseModel):
    """Parameters of the diffusion collapse experiment."""
    n_trials: int = Field(default=10000, ge=100)
    step_len: float = Field(default=0.05, gt=0.0, le=0.05)
    absorb_tol: float = Field(default=0.05, gt=0.0)
    max_steps: int = Field(default=20000, gt=0)
    batch_size: int = Field(default=2048, gt=0)
    confidence: float = Field(default=0.95, gt=0.0, lt=1.0)
    start_probabilities: list[float] = Field(
        default=[0.5, 0.6, 0.7, 0.8, 0.9],
        min_length=2,
        description="|⟨start, t₁⟩|² of the CP¹ starts, increasing"
    )
    invariance_probability: float = Field(default=0.8, gt=0.0, lt=1.0)
    sigmas: float = Field(default=3.0, gt=0.0, description="Binomial σ allowed in statistical checks")
    n_modes: int = Field(default=16, ge=2, le=64, description="Modes for manifold targets")
    manifold_centers: list[float] = Field(
        default_factory=list,
        description="δ̃ centres for an optional manifold walk (data only); the first is the start"
    )

    class Config:
        extra = "forbid"

    @model_validator(mode="after")
    def _check_tolerance(self) -> "DiffuseParams":
        if self.absorb_tol > self.step_len:
            raise ValueError("absorb_tol must not exceed step_len")
        return self


def _binomial_sigma(frequency: float, n: int) -> float:
    return math.sqrt(max(frequency * (1.0 - frequency), 1e-12) / n)


def _rows(probability: float, report: HitReport) -> list[list[float]]:
    return [
        [probability, float(index), hit.fs_distance, float(hit.hits), float(hit.trials),
         hit.frequency, hit.ci_low, hit.ci_high, hit.born_reference]
        for index, hit in enumerate(report.targets)
    ]


class DiffuseExperiment(ExperimentBase):
    """
    Experiment for collapse by diffusion on projective space.

    Checks:
    - a start that is a target is absorbed immediately
    - a symmetric start splits 0.5/0.5 within the binomial bound
    - hit frequency of t₁ grows as the start approaches it
    - a fixed random unitary applied to everything leaves frequencies unchanged
    """

    Params = DiffuseParams

    def get_definition(self) -> ExperimentDefinition:
        return ExperimentDefinition(
            experiment_id="diffuse",
            experiment_version="1.0.0",
            display_name="Diffusion Collapse",
            description="Monte Carlo collapse as an absorbed isotropic walk on CP¹.",
            category=ExperimentCategory.STOCHASTIC,
            config_schema=DiffuseParams.model_json_schema(),
        )

    def _config(self, params: DiffuseParams, seed: int, n_modes: int = 2, n_trials: Optional[int] = None) -> WalkConfig:
        return WalkConfig(
            step_len=params.step_len,
            max_steps=params.max_steps,
            absorb_tol=params.absorb_tol,
            seed=seed,
            n_trials=n_trials or params.n_trials,
            n_modes=n_modes,
            confidence=params.confidence,
            batch_size=params.batch_size,
        )

    def run(
        self,
        params: DiffuseParams,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        cfg = self._config(params, seed)
        checks: list[CheckResult] = []
        rows: list[list[float]] = []
        targets = [ProjectivePoint.normalized([1.0, 0.0]), ProjectivePoint.normalized([0.0, 1.0])]

        own = diffuse_walk(targets[0], targets, self._config(params, seed, n_trials=100))
        checks.append(CheckResult.within("self_target", own.targets[0].frequency, 1.0, 0.0))

        reports: dict[float, HitReport] = {}
        for probability in params.start_probabilities:
            start = ProjectivePoint.on_cp1(probability)
            reports[probability] = diffuse_walk(start, targets, cfg, workers=parallel_trials)
            rows.extend(_rows(probability, reports[probability]))

        frequencies = [reports[p].targets[0].frequency for p in params.start_probabilities]
        if 0.5 in reports:
            symmetric = reports[0.5]
            sigma = _binomial_sigma(0.5, symmetric.n_absorbed)
            checks.append(CheckResult.within(
                "symmetric_split", symmetric.targets[0].frequency, 0.5, params.sigmas * sigma,
                "equidistant start against the binomial bound"
            ))
        steps = [later - earlier for earlier, later in zip(frequencies, frequencies[1:])]
        checks.append(CheckResult.holds(
            "distance_monotone", all(step >= 0.0 for step in steps), min(steps),
            "frequency of t₁ is non-increasing in the distance to it"
        ))

        p = params.invariance_probability
        baseline = reports.get(p) or diffuse_walk(ProjectivePoint.on_cp1(p), targets, cfg, workers=parallel_trials)
        unitary = unitary_group.rvs(2, random_state=seed)
        rotated = diffuse_walk(
            ProjectivePoint.on_cp1(p).transformed(unitary),
            [target.transformed(unitary) for target in targets],
            cfg,
            workers=parallel_trials,
        )
        f1, f2 = baseline.targets[0].frequency, rotated.targets[0].frequency
        pooled = 0.5 * (f1 + f2)
        bound = params.sigmas * math.sqrt(
            max(pooled * (1.0 - pooled), 1e-12) * (1.0 / baseline.n_absorbed + 1.0 / rotated.n_absorbed)
        )
        checks.append(CheckResult.within("unitary_invariance", f2, f1, bound))

        data = {
            "frequencies": dict(zip(map(str, params.start_probabilities), frequencies)),
            "born_reference": {
                str(q): reports[q].targets[0].born_reference for q in params.start_probabilities
            },
            "mean_steps": {str(q): reports[q].mean_steps for q in params.start_probabilities},
            "rotated_frequency": f2,
        }
        tables = [Table(name="hit_frequencies", columns=HIT_COLUMNS, rows=rows)]

        if params.manifold_centers:
            points = manifold_targets(params.manifold_centers, 1.0, DEFAULT_GRID, params.n_modes)
            start, rest = points[0], points[1:] or points
            manifold = diffuse_walk(
                start, rest, self._config(params, seed, n_modes=params.n_modes), workers=parallel_trials
            )
            data["manifold"] = manifold.model_dump()
            tables.append(Table(name="manifold_hits", columns=HIT_COLUMNS, rows=_rows(0.0, manifold)))

        return ExperimentResult(experiment_id="diffuse", checks=checks, data=data, tables=tables)
