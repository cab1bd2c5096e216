"""
Quantum geometry experiment for Hilbert Embedding Lab.

Uncertainty relation and identity, field brackets, Ehrenfest and
projection identities, and projective speed and acceleration, on both
finite-dimensional and grid states.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from core.grid import gaussian_packet, make_tilde_delta
from core.operators import custom_op, hamiltonian_op, momentum_op, pauli_op, position_op
from core.quantum_geometry import (
    decompose_tangent,
    ehrenfest_check,
    fs_speed_check,
    fubini_study_distance,
    lie_bracket_check,
    momentum_spread_conservation,
    phase_parallel_acceleration,
    projection_identity,
    projective_accel,
    projective_speed,
    uncertainty,
    uncertainty_report,
    unitary_invariance_check,
)
from core.schemas import (
    CheckResult,
    ExperimentCategory,
    ExperimentDefinition,
    ExperimentResult,
    GridSpec,
    Potential,
    PotentialKind,
    Table,
)
from plugins.base import ExperimentBase


def random_hermitian(rng: np.random.Generator, size: int) -> np.ndarray:
    z = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return 0.5 * (z + z.conj().T)


def random_unit(rng: np.random.Generator, size: int) -> np.ndarray:
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return z / np.linalg.norm(z)


class UncertaintyParams(BaseModel):
    """Parameters of the quantum geometry experiment."""
    n_triples: int = Field(default=50, ge=1, description="Random finite-dimensional (A, B, φ)")
    dimension: int = Field(default=4, ge=2, le=32)
    half_width: float = Field(default=10.0, gt=0.0)
    fine_points: int = Field(default=16001, ge=101, description="Grid for the minimum-uncertainty check")
    coarse_points: int = Field(default=2001, ge=101, description="Grid for dynamics and brackets")
    n_unitaries: int = Field(default=20, ge=1)
    ehrenfest_window: tuple[float, float] = Field(default=(0.0, 0.5))
    ehrenfest_dt: float = Field(default=1e-3, gt=0.0)
    packet_velocity: float = Field(default=2.0)

    class Config:
        extra = "forbid"


class UncertaintyExperiment(ExperimentBase):
    """
    Experiment for the geometry of observables on the sphere of states.

    Checks:
    - uncertainty identity gap on random finite-dimensional triples
    - minimum uncertainty of the Gaussian and its unitary invariance
    - field bracket against the commutator
    - Ehrenfest and projection identities
    - projective speed Δh and acceleration Δ(h²), with a Fubini-Study cross-check
    """

    Params = UncertaintyParams

    def get_definition(self) -> ExperimentDefinition:
        return ExperimentDefinition(
            experiment_id="uncertainty",
            experiment_version="1.0.0",
            display_name="Quantum Geometry",
            description=(
                "Observables as vector fields: uncertainty, brackets, "
                "Ehrenfest and projective kinematics."
            ),
            category=ExperimentCategory.QUANTUM,
            config_schema=UncertaintyParams.model_json_schema(),
        )

    def run(
        self,
        params: UncertaintyParams,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        rng = np.random.default_rng(seed)
        checks: list[CheckResult] = []
        rows = []

        # Finite-dimensional triples
        identity_gap, relation_slack = 0.0, math.inf
        for index in range(params.n_triples):
            a = custom_op(random_hermitian(rng, params.dimension), "A")
            b = custom_op(random_hermitian(rng, params.dimension), "B")
            phi = random_unit(rng, params.dimension)
            report = uncertainty_report(a, b, phi)
            identity_gap = max(identity_gap, report.identity_gap)
            relation_slack = min(relation_slack, report.product - report.bound)
            rows.append([float(index), report.delta_a, report.delta_b, report.product, report.bound, report.identity_gap])
        checks.append(CheckResult.below("uncertainty_identity", identity_gap, 1e-10))
        checks.append(CheckResult.above("uncertainty_relation", relation_slack, -1e-12))

        # Pauli algebra
        spin = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
        level = custom_op(np.diag([-1.0, 1.0]), "h")
        checks.append(CheckResult.within("spin_projective_speed", projective_speed(level, spin), 1.0, 1e-8))
        checks.append(CheckResult.within("spin_projective_accel", projective_accel(level, spin), 0.0, 1e-8))
        checks.append(CheckResult.within(
            "spin_phase_parallel", decompose_tangent(level, spin).phase_parallel, 0.0, 1e-12
        ))
        phi = random_unit(rng, 2)
        field, direct = lie_bracket_check(pauli_op("x"), pauli_op("y"), phi)
        expected = 2j * pauli_op("z").matrix @ phi
        checks.append(CheckResult.below(
            "pauli_bracket", float(np.max(np.abs(field - expected)) + np.max(np.abs(direct - expected))), 1e-6
        ))

        h_random = custom_op(random_hermitian(rng, params.dimension), "h")
        state = random_unit(rng, params.dimension)
        fd_speed, speed = fs_speed_check(h_random, state)
        h2 = h_random.squared()
        checks.append(CheckResult.within("finite_speed_delta_h", speed, uncertainty(h_random, state), 1e-8))
        checks.append(CheckResult.within("finite_accel_delta_h2", projective_accel(h_random, state), uncertainty(h2, state), 1e-8))
        checks.append(CheckResult.within("finite_fs_speed", fd_speed, speed, 1e-4))

        # Grid states
        half = params.half_width
        fine = GridSpec.line(-half, half, params.fine_points)
        gaussian = make_tilde_delta(0.0, 1.0, fine)
        canonical = uncertainty_report(position_op(fine), momentum_op(fine), gaussian)
        checks.append(CheckResult.within("minimum_uncertainty", canonical.product, 0.5, 1e-6))
        checks.append(CheckResult.within("minimum_uncertainty_bound", canonical.bound, 0.5, 1e-6))

        coarse = GridSpec.line(-half, half, params.coarse_points)
        packet = make_tilde_delta(0.0, 1.0, coarse)
        reports = unitary_invariance_check(packet, params.n_unitaries, seed=seed)
        worst = min(report.product for report in reports)
        checks.append(CheckResult.above("unitary_invariance", worst, 0.5 - 1e-3))

        x_op, p_op = position_op(coarse), momentum_op(coarse)
        field, direct = lie_bracket_check(x_op, p_op, packet)
        checks.append(CheckResult.below(
            "canonical_bracket_fields", float(np.max(np.abs(field.values - direct.values))), 1e-6
        ))
        checks.append(CheckResult.below(
            "canonical_bracket_value", float(np.max(np.abs(direct.values - 1j * packet.values))), 1e-4
        ))

        free = hamiltonian_op(coarse)
        oscillator = hamiltonian_op(coarse, potential=Potential(kind=PotentialKind.HARMONIC, strength=1.0))
        moving = gaussian_packet(coarse, 1.0, 1.0, 0.5)
        free_gap = ehrenfest_check(p_op, free, moving, params.ehrenfest_window, params.ehrenfest_dt)
        osc_gap = ehrenfest_check(x_op, oscillator, moving, params.ehrenfest_window, params.ehrenfest_dt)
        checks.append(CheckResult.below("ehrenfest_free_momentum", free_gap, 1e-6))
        checks.append(CheckResult.below("ehrenfest_oscillator", osc_gap, 1e-5))

        boosted = gaussian_packet(coarse, 0.0, 1.0, params.packet_velocity)
        lhs, rhs = projection_identity(p_op, free, boosted)
        checks.append(CheckResult.below("projection_identity", abs(lhs - rhs), 1e-8))
        checks.append(CheckResult.below(
            "parallel_acceleration", abs(phase_parallel_acceleration(free, boosted)), 1e-6
        ))

        grid_fd, grid_speed = fs_speed_check(free, boosted)
        checks.append(CheckResult.within("grid_speed_delta_h", grid_speed, uncertainty(free, boosted), 1e-4))
        checks.append(CheckResult.within("grid_fs_speed", grid_fd, grid_speed, 1e-4))

        drift = momentum_spread_conservation(boosted, params.ehrenfest_window, params.ehrenfest_dt)
        checks.append(CheckResult.below("momentum_spread_conserved", drift, 1e-6))

        separated = fubini_study_distance(packet, make_tilde_delta(2.0, 1.0, coarse))
        checks.append(CheckResult.within("fs_gaussian_overlap", separated, math.acos(math.exp(-1.0)), 1e-8))

        table = Table(
            name="uncertainty_triples",
            columns=["triple", "delta_a", "delta_b", "product", "bound", "identity_gap"],
            rows=rows,
        )
        return ExperimentResult(
            experiment_id="uncertainty",
            checks=checks,
            data={
                "canonical_product": canonical.product,
                "unitary_min_product": worst,
                "ehrenfest_free_gap": free_gap,
                "ehrenfest_oscillator_gap": osc_gap,
            },
            tables=[table],
        )