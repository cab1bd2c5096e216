"""
Wave packet experiment for Hilbert Embedding Lab.

Shadows of accelerated Gaussian packets on the delta-state manifold,
width-reset collapse, Madelung residuals, the constrained-path residual,
the free propagator and Crank-Nicolson against the closed form.
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from core.exceptions import NoRealRootError
from core.grid import gaussian_packet, hermite_function
from core.operators import hamiltonian_op
from core.packet_shadow import (
    DEFAULT_DT,
    DEFAULT_GRID,
    WaveTrajectory,
    closed_form_trajectory,
    collapse_orthogonality,
    collapse_width_reset,
    crank_nicolson_evolve,
    expected_position,
    frame_table,
    frames_around,
    free_propagator,
    generator_shadow_velocity,
    linear_potential,
    madelung_residuals,
    measured_width,
    momentum_projection_split,
    packet_closed_form,
    packet_width,
    propagator_group_gap,
    propagator_residual,
    shadow_acceleration,
    shadow_velocity,
    spacetime_samples,
    stationary_trajectory,
    theorem1_residual,
)
from core.schemas import (
    CheckResult,
    ExperimentCategory,
    ExperimentDefinition,
    ExperimentResult,
    GridSpec,
    PacketParams,
    Potential,
    PotentialKind,
    Table,
)
from plugins.base import ExperimentBase


class PacketExperimentParams(BaseModel):
    """Parameters of the wave packet experiment."""
    sigma: float = Field(default=1.0, gt=0.0, description="Initial packet width")
    m: float = Field(default=1.0, gt=0.0, description="Mass")
    velocity_pairs: list[tuple[float, float]] = Field(
        default=[(2.0, 0.0), (0.0, 0.5), (1.0, -1.0), (-1.5, 0.25), (0.5, 1.0)],
        min_length=1,
        description="(v0, w) pairs for the shadow checks"
    )
    frame_dt: float = Field(default=1e-3, gt=0.0, le=1e-2, description="Spacing of closed-form frames")
    collapse_interval: float = Field(default=0.3, gt=0.0, description="Time between width resets")
    n_collapses: int = Field(default=3, ge=1, le=20)
    window: tuple[float, float] = Field(default=(0.0, 0.5))
    cn_dt: float = Field(default=DEFAULT_DT, gt=0.0)
    analysis_time: float = Field(default=0.25, description="Time of the Crank-Nicolson analyses")
    theorem_eps: float = Field(default=0.05, gt=0.0)
    theorem_tau: float = Field(default=0.5)
    propagator_points: int = Field(default=801, ge=101, le=4001)
    export_stride: int = Field(default=100, ge=1, description="Frame stride of the CSV export")

    class Config:
        extra = "forbid"


def _random_phase(rng: np.random.Generator, x: np.ndarray) -> np.ndarray:
    """Smooth θ(x) = a sin(bx) + c x²."""
    a, b, c = rng.uniform(-1.0, 1.0), rng.uniform(0.2, 1.0), rng.uniform(-0.1, 0.1)
    return a * np.sin(b * x) + c * x * x


def _rephased(traj: WaveTrajectory, theta: np.ndarray) -> WaveTrajectory:
    return WaveTrajectory(
        grid=traj.grid, times=traj.times, values=traj.values * np.exp(1j * theta)[None, :],
        m=traj.m, potential=traj.potential, scheme=traj.scheme,
    )


class PacketExperiment(ExperimentBase):
    """
    Experiment for the shadow of a Schrödinger packet.

    Checks:
    - shadow velocity -v0 and acceleration -w for several (v0, w)
    - fibre invariance and the orthogonal-generator reading
    - velocity after a chain of width resets
    - Madelung residuals, with a corrupted-phase control
    - constrained-path residual for solutions and a frozen non-solution
    - free propagator PDE residual and group property
    - Crank-Nicolson against the closed form, Ehrenfest centre and width law
    """

    Params = PacketExperimentParams

    def get_definition(self) -> ExperimentDefinition:
        return ExperimentDefinition(
            experiment_id="packet",
            experiment_version="1.0.0",
            display_name="Packet Shadows",
            description=(
                "Projections of Schrödinger packets onto Gaussian delta states, "
                "collapse by width reset and propagator checks."
            ),
            category=ExperimentCategory.QUANTUM,
            config_schema=PacketExperimentParams.model_json_schema(),
        )

    def run(
        self,
        params: PacketExperimentParams,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        rng = np.random.default_rng(seed)
        checks: list[CheckResult] = []
        data: dict = {}
        rows = []
        x = DEFAULT_GRID.axis(0)
        around_zero = frames_around(0.0, params.frame_dt)

        # Shadow kinematics at t=0
        velocity_gap, accel_gap, fibre_gap, literal_gap = 0.0, 0.0, 0.0, 0.0
        for v0, w in params.velocity_pairs:
            packet = PacketParams(sigma=params.sigma, m=params.m, v0=v0, w=w)
            traj = closed_form_trajectory(packet, around_zero)
            velocity = shadow_velocity(traj, 0.0)
            acceleration = shadow_acceleration(traj, 0.0)
            literal = shadow_velocity(traj, 0.0, literal=True)
            velocity_gap = max(velocity_gap, abs(velocity + v0))
            accel_gap = max(accel_gap, abs(acceleration + w))
            literal_gap = max(literal_gap, abs(literal - v0))
            rephased = _rephased(traj, _random_phase(rng, x))
            fibre_gap = max(fibre_gap, abs(shadow_velocity(rephased, 0.0) - velocity))
            rows.append([v0, w, velocity, acceleration, literal])
        checks.append(CheckResult.below("shadow_velocity", velocity_gap, 1e-4, "max |shadow velocity + v0|"))
        checks.append(CheckResult.below("shadow_acceleration", accel_gap, 1e-3, "max |shadow acceleration + w|"))
        checks.append(CheckResult.below("shadow_fibre_invariance", fibre_gap, 1e-10))
        data["literal_velocity_gap"] = literal_gap

        moving = PacketParams(sigma=params.sigma, m=params.m, v0=2.0)
        psi = packet_closed_form(moving, 0.0)
        free = hamiltonian_op(DEFAULT_GRID, params.m)
        direct = generator_shadow_velocity(psi, free)
        orthogonal = generator_shadow_velocity(psi, free, orthogonal=True)
        checks.append(CheckResult.below("shadow_orthogonal_generator", abs(direct - orthogonal), 1e-8))
        checks.append(CheckResult.within(
            "shadow_generator_reading", direct, -moving.v0, 5e-3,
            "instantaneous reading from -iĥψ on the 3-point grid Hamiltonian"
        ))

        # Width-reset collapse chain
        v0, w = max(params.velocity_pairs, key=lambda pair: abs(pair[1]))
        current = PacketParams(sigma=params.sigma, m=params.m, v0=v0, w=w)
        chain_gap, reset_gap = 0.0, 0.0
        for k in range(1, params.n_collapses + 1):
            current = collapse_width_reset(current, params.collapse_interval)
            reset_gap = max(reset_gap, abs(packet_width(current, 0.0) - params.sigma))
            traj = closed_form_trajectory(current, around_zero)
            expected = v0 + w * k * params.collapse_interval
            chain_gap = max(chain_gap, abs(shadow_velocity(traj, 0.0) + expected))
        checks.append(CheckResult.below("collapse_velocity", chain_gap, 1e-3, "max |shadow + v0 + w·t1| over the chain"))
        checks.append(CheckResult.below("collapse_width_restored", reset_gap, 1e-10))

        single = collapse_width_reset(PacketParams(sigma=1.0, m=1.0), 0.3)
        checks.append(CheckResult.within("collapse_root", single.sigma**2, 0.9, 1e-12))
        try:
            collapse_width_reset(PacketParams(sigma=1.0, m=1.0), 0.6)
            rejected = False
        except NoRealRootError:
            rejected = True
        checks.append(CheckResult.holds("collapse_interval_limit", rejected, description="t1 > mσ²/2 has no reset"))
        checks.append(CheckResult.below(
            "collapse_orthogonality",
            max(abs(collapse_orthogonality(params.sigma, a, DEFAULT_GRID)) for a in (0.0, 0.7)),
            1e-8,
        ))

        # Madelung pair
        accelerated = PacketParams(sigma=params.sigma, m=params.m, v0=2.0, w=0.5)
        closed = closed_form_trajectory(accelerated, frames_around(params.analysis_time, params.frame_dt))
        cont, hj = madelung_residuals(closed, params.analysis_time)
        checks.append(CheckResult.below("madelung_closed_form", max(cont, hj), 1e-3))
        corrupted = _rephased(closed, 0.1 * x * x)
        _, corrupted_hj = madelung_residuals(corrupted, params.analysis_time)
        checks.append(CheckResult.above("madelung_corrupted_phase", corrupted_hj, 1e-1))

        ground = hermite_function(DEFAULT_GRID, 0, 0.0, 1.0)
        oscillator = Potential(kind=PotentialKind.HARMONIC, strength=1.0)
        still = stationary_trajectory(ground, 0.5, frames_around(0.0, params.frame_dt), potential=oscillator)
        still_cont, _ = madelung_residuals(still, 0.0)
        checks.append(CheckResult.below("madelung_stationary", still_cont, 1e-6))

        # Crank-Nicolson against the closed form
        start = packet_closed_form(accelerated, params.window[0])
        numeric = crank_nicolson_evolve(
            start, linear_potential(accelerated), params.window, params.cn_dt, params.m
        )
        reference = closed_form_trajectory(accelerated, numeric.times)
        sup_gap = float(np.max(np.abs(numeric.values - reference.values)))
        checks.append(CheckResult.below("cn_closed_form", sup_gap, 1e-3))
        centre_gap = max(
            abs(expected_position(numeric.frame(i)) - accelerated.center(float(t)))
            for i, t in enumerate(numeric.times)
        )
        checks.append(CheckResult.below("cn_ehrenfest_center", centre_gap, 1e-3))
        cn_cont, cn_hj = madelung_residuals(numeric, params.analysis_time)
        checks.append(CheckResult.below("madelung_crank_nicolson", max(cn_cont, cn_hj), 1e-3))
        cn_velocity = shadow_velocity(numeric, params.analysis_time)
        checks.append(CheckResult.within(
            "cn_shadow_velocity", cn_velocity, -accelerated.velocity(params.analysis_time), 1e-2
        ))
        lhs, rhs = momentum_projection_split(numeric, params.analysis_time)
        checks.append(CheckResult.below("momentum_projection_split", abs(lhs - rhs), 1e-8))

        spreading = PacketParams(sigma=params.sigma, m=params.m)
        free_traj = crank_nicolson_evolve(
            packet_closed_form(spreading, params.window[0]), None, params.window, params.cn_dt, params.m
        )
        width_gap = max(
            abs(measured_width(free_traj.frame(i)) - packet_width(spreading, float(t)))
            for i, t in enumerate(free_traj.times)
        )
        checks.append(CheckResult.below("cn_width_law", width_gap, 1e-3))

        # Constrained path
        x_axis, t_axis = (-10.0, 10.0, 401), (0.0, 1.0, 201)
        solution = spacetime_samples(moving, x_axis, t_axis)
        solution_res = theorem1_residual(solution, params.theorem_tau, params.theorem_eps, params.m)
        frozen_values = np.repeat(solution.values[:, :1], solution.values.shape[1], axis=1)
        frozen_res = theorem1_residual(
            solution.with_values(frozen_values), params.theorem_tau, params.theorem_eps, params.m
        )
        coarse = spacetime_samples(moving, (-10.0, 10.0, 101), (0.0, 1.0, 51))
        coarse_res = theorem1_residual(coarse, params.theorem_tau, params.theorem_eps, params.m)
        checks.append(CheckResult.below("constrained_path_solution", solution_res, 1e-2))
        checks.append(CheckResult.above("constrained_path_frozen", frozen_res, 1e-1))
        checks.append(CheckResult.holds(
            "constrained_path_refinement", solution_res < coarse_res, coarse_res - solution_res,
            "residual decreases from the coarse to the fine grid"
        ))

        # Free propagator
        g = free_propagator(params.m, 0.5, 1.0, 0.0, 0.0)
        relative = abs(propagator_residual(params.m, 0.5, 1.0, 0.0, 0.0)) / abs(g)
        checks.append(CheckResult.below("propagator_residual", relative, 1e-3))
        swapped = free_propagator(params.m, 0.0, 1.0, 0.5, 0.0)
        checks.append(CheckResult.holds("propagator_symmetry", g == swapped, abs(g - swapped)))
        line = GridSpec.line(-10.0, 10.0, params.propagator_points)
        group_gap = propagator_group_gap(gaussian_packet(line, 0.0, 1.0, 1.0), params.m, 1.0, 0.5, 0.0)
        checks.append(CheckResult.below("propagator_group", group_gap, 1e-3))

        checks.append(CheckResult.within(
            "width_law_doubling", packet_width(spreading, params.m * params.sigma**2) ** 2,
            2.0 * params.sigma**2, 1e-12
        ))

        data.update({
            "generator_velocity": direct,
            "cn_sup_gap": sup_gap,
            "cn_shadow_velocity": cn_velocity,
            "theorem_residual": solution_res,
            "theorem_residual_coarse": coarse_res,
            "theorem_residual_frozen": frozen_res,
            "propagator_relative_residual": relative,
            "madelung": {"continuity": cont, "hamilton_jacobi": hj},
        })
        shadows = Table(
            name="shadow_kinematics",
            columns=["v0", "w", "velocity", "acceleration", "literal_velocity"],
            rows=rows,
        )
        frames = frame_table(numeric, stride=params.export_stride, name="frames")
        return ExperimentResult(
            experiment_id="packet", checks=checks, data=data, tables=[shadows, frames]
        )
