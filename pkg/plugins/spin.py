"""
Spin geodesic experiment for Hilbert Embedding Lab.

Schrödinger paths of a two-level system in a magnetic field are
geodesics of the sphere with metric ĥ_M⁻²; chord and perturbed paths
are not.
"""

import cmath
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from core.schemas import (
    CheckResult,
    ExperimentCategory,
    ExperimentDefinition,
    ExperimentResult,
    Table,
    TwoLevelSystem,
)
from core.spin_geodesics import (
    SpinState,
    chord_path,
    ellipsoid_embedding,
    ellipsoid_residual,
    evolve_spin,
    geodesic_residual,
    k_speed,
    neighboring_point,
    perturbed_path,
    spin_path,
)
from plugins.base import ExperimentBase


class SpinParams(BaseModel):
    """Parameters of the spin geodesic experiment."""
    M: float = Field(default=10.0, gt=0.0, description="Rest energy")
    mu_B: float = Field(default=1.0, description="Zeeman energy μB")
    window: tuple[float, float] = Field(default=(0.0, 0.5))
    dt: float = Field(default=1e-4, gt=0.0)
    delta: float = Field(default=1e-4, gt=0.0, description="Bump amplitude of the first variation")
    n_perturbations: int = Field(default=16, ge=1)
    control_size: float = Field(default=1e-2, gt=0.0, description="Size of the perturbed control path")
    residual_limit: float = Field(default=1e-6, gt=0.0)
    n_states: int = Field(default=5, ge=1, description="Random initial states")

    class Config:
        extra = "forbid"


class SpinExperiment(ExperimentBase):
    """
    Experiment for geodesics of a spin in a magnetic field.

    Checks:
    - exact solutions have a vanishing first variation
    - perturbed and chord controls fail by at least two orders of magnitude
    - the K-speed is 1 and the neighbouring-point phases are e^{±i2πμB/M}
    - ĥ_M⁻¹ψ lies on the ellipsoid
    """

    Params = SpinParams

    def get_definition(self) -> ExperimentDefinition:
        return ExperimentDefinition(
            experiment_id="spin",
            experiment_version="1.0.0",
            display_name="Spin Geodesics",
            description="Schrödinger evolution of a two-level system as geodesic motion.",
            category=ExperimentCategory.QUANTUM,
            config_schema=SpinParams.model_json_schema(),
        )

    def run(
        self,
        params: SpinParams,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        rng = np.random.default_rng(seed)
        system = TwoLevelSystem(M=params.M, mu_B=params.mu_B)
        checks: list[CheckResult] = []
        rows = []
        worst_exact, worst_ratio = 0.0, math.inf
        speed_gap, phase_gap, ellipsoid_gap = 0.0, 0.0, 0.0
        plus_phase = cmath.exp(2j * math.pi * params.mu_B / params.M)

        for index in range(params.n_states):
            psi0 = SpinState.random(rng)
            exact = spin_path(system, psi0, params.window, params.dt)
            residual = geodesic_residual(
                system, psi0, params.window, params.dt, params.delta,
                params.n_perturbations, seed=seed + index, path=exact,
            )
            control = geodesic_residual(
                system, psi0, params.window, params.dt, params.delta,
                params.n_perturbations, seed=seed + index,
                path=perturbed_path(exact, params.control_size, seed=seed + index),
            )
            worst_exact = max(worst_exact, residual)
            worst_ratio = min(worst_ratio, control / max(residual, 1e-300))
            rows.append([float(index), residual, control])

            for t in np.linspace(*params.window, 5):
                state = evolve_spin(system, psi0, float(t))
                speed_gap = max(speed_gap, abs(k_speed(system, state) - 1.0))
                coords = ellipsoid_embedding(system, state)
                ellipsoid_gap = max(ellipsoid_gap, ellipsoid_residual(system, coords))

            moved = neighboring_point(system, psi0)
            phase_gap = max(
                phase_gap,
                abs(moved.c_plus - plus_phase * psi0.c_plus),
                abs(moved.c_minus - plus_phase.conjugate() * psi0.c_minus),
            )

        checks.append(CheckResult.below(
            "geodesic_residual", worst_exact, params.residual_limit,
            "max first variation of the exact paths"
        ))
        checks.append(CheckResult.above(
            "perturbed_control_ratio", worst_ratio, 100.0,
            "perturbed-path residual over exact-path residual"
        ))

        start = SpinState.normalized(1.0, 1.0)
        end = evolve_spin(system, start, params.window[1])
        chord = chord_path(start, end, exact.shape[0])
        chord_residual = geodesic_residual(
            system, start, params.window, params.dt, params.delta,
            params.n_perturbations, seed=seed, path=chord,
        )
        checks.append(CheckResult.above(
            "chord_control", chord_residual, 100.0 * params.residual_limit,
            "the straight chord between the same endpoints is not a geodesic"
        ))
        checks.append(CheckResult.below("k_speed_unit", speed_gap, 1e-12))
        checks.append(CheckResult.below("neighboring_phases", phase_gap, 1e-12))
        checks.append(CheckResult.below("ellipsoid_embedding", ellipsoid_gap, 1e-12))

        table = Table(name="geodesic_residuals", columns=["state", "exact", "perturbed"], rows=rows)
        return ExperimentResult(
            experiment_id="spin",
            checks=checks,
            data={
                "max_exact_residual": worst_exact,
                "min_control_ratio": worst_ratio,
                "chord_residual": chord_residual,
            },
            tables=[table],
        )
