"""
Action experiment for Hilbert Embedding Lab.

Compares the kernel and reduced routes to the action, and checks that
direct minimization and Euler-Lagrange integration give the same
dynamics, including the Newtonian limit of the curved kernel.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from core.action_dynamics import (
    Trajectory,
    action_functional,
    energy,
    first_variation,
    minimize_action,
    shoot_boundary_value,
    solve_euler_lagrange,
)
from core.schemas import (
    ActionKind,
    ActionProblem,
    CheckResult,
    ExperimentCategory,
    ExperimentDefinition,
    ExperimentResult,
    Potential,
    PotentialKind,
    Table,
)
from plugins.base import ExperimentBase


class ActionParams(BaseModel):
    """Parameters of the action experiment."""
    eps: float = Field(default=0.05, gt=0.0, le=0.2, description="Delta width of the kernel route")
    n_trajectories: int = Field(default=5, ge=1, le=20, description="Random paths per kernel kind")
    n_segments: int = Field(default=8, ge=2, le=64)
    duration: float = Field(default=0.4, gt=0.0, description="Parameter window of the random paths")
    route_tolerance: float = Field(default=2e-2, gt=0.0)
    g: float = Field(default=0.5, description="Field strength of u(x) = g·x")
    sag_window: float = Field(default=1.0, gt=0.0)
    n_knots: int = Field(default=64, ge=8)
    dt: float = Field(default=1e-3, gt=0.0, le=1e-2)
    bump_size: float = Field(default=1e-2, gt=0.0)

    class Config:
        extra = "forbid"


def _random_path(kind: ActionKind, rng: np.random.Generator, params: ActionParams) -> Trajectory:
    """Smooth path with a random slope and one random sine mode."""
    tau = np.linspace(0.0, params.duration, params.n_segments + 1)
    wave = np.sin(math.pi * tau / params.duration)
    slope, amplitude = rng.uniform(0.5, 1.5), rng.uniform(-0.1, 0.1)
    x = slope * tau + amplitude * wave
    if kind == ActionKind.CLASSICAL:
        return Trajectory(times=tau, points=x)
    # timelike labels: dt/dτ exceeds |dx/dτ| everywhere
    t = 3.0 * tau + rng.uniform(-0.05, 0.05) * wave
    return Trajectory(times=tau, points=np.column_stack([x, t]))


class ActionExperiment(ExperimentBase):
    """
    Experiment for action functionals and the resulting dynamics.

    Checks:
    - kernel and reduced actions agree on random paths for all three kinds
    - minimize_action reproduces the shooting solution of the ODE
    - u = g·x gives dv/dt = -g (Newtonian limit)
    - RK4 energy drift and the oscillator oracle
    - first variations of stationary paths are second order
    """

    Params = ActionParams

    def get_definition(self) -> ExperimentDefinition:
        return ExperimentDefinition(
            experiment_id="action",
            experiment_version="1.0.0",
            display_name="Action Functionals",
            description=(
                "Kernel against reduced actions, direct minimization against "
                "Euler-Lagrange integration."
            ),
            category=ExperimentCategory.RELATIVISTIC,
            config_schema=ActionParams.model_json_schema(),
        )

    def run(
        self,
        params: ActionParams,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        rng = np.random.default_rng(seed)
        checks: list[CheckResult] = []
        rows = []
        field = Potential(kind=PotentialKind.LINEAR, strength=params.g)
        problems = {
            ActionKind.CLASSICAL: ActionProblem(
                kind=ActionKind.CLASSICAL,
                potential=Potential(kind=PotentialKind.HARMONIC, strength=1.0),
            ),
            ActionKind.RELATIVISTIC: ActionProblem(kind=ActionKind.RELATIVISTIC),
            ActionKind.CURVED: ActionProblem(kind=ActionKind.CURVED, potential=field),
        }

        # Route equivalence
        for kind, problem in problems.items():
            worst = 0.0
            for index in range(params.n_trajectories):
                path = _random_path(kind, rng, params)
                reduced = action_functional(problem, path, via="reduced")
                kernel = action_functional(problem, path, via="kernel", eps=params.eps)
                relative = abs(kernel - reduced) / max(abs(reduced), 1e-12)
                worst = max(worst, relative)
                rows.append([float(list(ActionKind).index(kind)), float(index), reduced, kernel, relative])
            checks.append(CheckResult.below(
                f"route_equivalence_{kind.value}", worst, params.route_tolerance,
                "max relative gap between kernel and reduced actions"
            ))

        # Newtonian limit of the curved kernel
        curved = problems[ActionKind.CURVED].model_copy(update={"window": (0.0, params.sag_window)})
        boundary = ((0.0, 0.0), (params.sag_window, 0.0))
        minimized = minimize_action(curved, boundary, n_knots=params.n_knots)
        shot = shoot_boundary_value(curved, boundary, dt=params.dt)
        sag_gap = float(np.max(np.abs(minimized.points - shot.position(minimized.times))))
        checks.append(CheckResult.below(
            "newtonian_limit", sag_gap, 1e-3,
            "minimized curved-kernel path against the dv/dt = -g solution"
        ))

        falling = solve_euler_lagrange(curved, (0.0, 0.0), dt=params.dt)
        fall_gap = float(np.max(np.abs(falling.velocities + params.g * falling.times)))
        checks.append(CheckResult.below("free_fall_velocity", fall_gap, 1e-8))

        oscillator = problems[ActionKind.CLASSICAL].model_copy(update={"window": (0.0, math.pi / 2.0)})
        swing = minimize_action(oscillator, ((0.0, 1.0), (math.pi / 2.0, 0.0)), n_knots=params.n_knots)
        swing_gap = float(np.max(np.abs(swing.points - np.cos(swing.times))))
        checks.append(CheckResult.below("oscillator_minimizer", swing_gap, 1e-3))

        integrated = solve_euler_lagrange(oscillator, (1.0, 0.0), dt=params.dt)
        ode_gap = float(np.max(np.abs(integrated.points - np.cos(integrated.times))))
        checks.append(CheckResult.below("oscillator_rk4", ode_gap, 1e-6))
        energies = energy(oscillator, integrated)
        drift = float(np.max(np.abs(energies - energies[0])) / abs(energies[0]))
        checks.append(CheckResult.below("energy_drift", drift, 1e-6))

        # First variation is second order around a stationary path
        bump = np.sin(math.pi * integrated.times / integrated.times[-1])
        small = first_variation(oscillator, integrated, bump, params.bump_size)
        large = first_variation(oscillator, integrated, bump, 2.0 * params.bump_size)
        ratio = large / small if small != 0.0 else math.inf
        checks.append(CheckResult.within(
            "first_variation_order", ratio, 4.0, 0.2,
            "action change ratio for bumps of size 2δ and δ"
        ))

        table = Table(
            name="route_equivalence",
            columns=["kind", "trajectory", "reduced", "kernel", "rel_gap"],
            rows=rows,
        )
        return ExperimentResult(
            experiment_id="action",
            checks=checks,
            data={"sag_gap": sag_gap, "energy_drift": drift, "variation_ratio": ratio},
            tables=[table],
        )
