"""Tests for action functionals and material-point dynamics."""

import numpy as np
import pytest

from core.action_dynamics import (
    Trajectory,
    action_functional,
    energy,
    first_variation,
    minimize_action,
    shoot_boundary_value,
    solve_euler_lagrange,
)
from core.exceptions import DomainError, ShapeError
from core.schemas import ActionKind, ActionProblem, Potential, PotentialKind


@pytest.fixture
def falling() -> ActionProblem:
    return ActionProblem(potential=Potential(kind=PotentialKind.LINEAR, strength=0.5))


@pytest.fixture
def oscillator() -> ActionProblem:
    return ActionProblem(
        potential=Potential(kind=PotentialKind.HARMONIC, strength=1.0), window=(0.0, 2.0)
    )


class TestEulerLagrange:
    def test_uniform_acceleration_is_exact(self, falling):
        traj = solve_euler_lagrange(falling, (0.0, 1.0))
        expected = traj.times - 0.25 * traj.times**2
        assert np.max(np.abs(traj.points - expected)) < 1e-12

    def test_energy_is_conserved(self, oscillator):
        traj = solve_euler_lagrange(oscillator, (1.0, 0.0))
        e = energy(oscillator, traj)
        assert np.max(np.abs(e - e[0])) < 1e-9

    def test_shooting_hits_both_ends(self, falling):
        traj = shoot_boundary_value(falling, ((0.0, 0.0), (1.0, 1.0)))
        assert traj.points[-1] == pytest.approx(1.0, abs=1e-9)
        assert traj.velocities[0] == pytest.approx(1.25, abs=1e-8)

    def test_energy_needs_velocities(self, falling):
        with pytest.raises(ShapeError):
            energy(falling, Trajectory(times=np.linspace(0, 1, 5), points=np.zeros(5)))


class TestActionMinimization:
    def test_knots_follow_the_parabola(self, falling):
        traj = minimize_action(falling, ((0.0, 0.0), (1.0, 0.0)))
        expected = 0.25 * traj.times * (1.0 - traj.times)
        assert np.max(np.abs(traj.points - expected)) < 1e-6

    def test_timelike_free_path_is_straight(self):
        problem = ActionProblem(kind=ActionKind.RELATIVISTIC)
        traj = minimize_action(problem, ((0.0, 0.0), (1.0, 0.5)), n_knots=16)
        assert np.allclose(traj.points, 0.5 * traj.times, atol=1e-8)

    def test_too_few_knots(self, falling):
        with pytest.raises(DomainError):
            minimize_action(falling, ((0.0, 0.0), (1.0, 0.0)), n_knots=4)


class TestActionFunctional:
    def test_free_straight_path(self):
        traj = Trajectory.from_function(lambda t: 2.0 * t, 0.0, 1.0, 11)
        assert action_functional(ActionProblem(), traj) == pytest.approx(2.0)

    def test_relativistic_rest_path(self):
        traj = Trajectory(times=np.linspace(0.0, 1.0, 11), points=np.zeros(11))
        problem = ActionProblem(kind=ActionKind.RELATIVISTIC, m=2.0)
        assert action_functional(problem, traj) == pytest.approx(1.0)

    def test_classical_path_is_stationary(self, falling):
        traj = minimize_action(falling, ((0.0, 0.0), (1.0, 0.0)))
        bump = lambda t: np.sin(np.pi * t)
        small = first_variation(falling, traj, bump, 1e-3)
        large = first_variation(falling, traj, bump, 1e-2)
        assert abs(small) < 1e-5
        assert large / small == pytest.approx(100.0, rel=1e-3)

    def test_bumps_must_vanish_at_endpoints(self, falling):
        traj = Trajectory.from_function(lambda t: t, 0.0, 1.0, 11)
        with pytest.raises(DomainError):
            first_variation(falling, traj, np.ones(11), 1e-3)

    def test_unknown_route(self):
        traj = Trajectory.from_function(lambda t: t, 0.0, 1.0, 11)
        with pytest.raises(ValueError):
            action_functional(ActionProblem(), traj, via="symbolic")


def _smooth_path(kind: ActionKind) -> Trajectory:
    tau = np.linspace(0.0, 0.4, 9)
    wave = np.sin(np.pi * tau / 0.4)
    x = tau + 0.05 * wave
    if kind == ActionKind.CLASSICAL:
        return Trajectory(times=tau, points=x)
    return Trajectory(times=tau, points=np.column_stack([x, 3.0 * tau + 0.02 * wave]))


class TestKernelRoute:
    @pytest.mark.parametrize("problem", [
        ActionProblem(potential=Potential(kind=PotentialKind.HARMONIC, strength=1.0)),
        ActionProblem(kind=ActionKind.RELATIVISTIC),
        ActionProblem(kind=ActionKind.CURVED, potential=Potential(kind=PotentialKind.LINEAR, strength=0.5)),
    ], ids=["classical", "relativistic", "curved"])
    def test_kernel_action_reproduces_reduced_action(self, problem):
        path = _smooth_path(problem.kind)
        reduced = action_functional(problem, path, via="reduced")
        kernel = action_functional(problem, path, via="kernel", eps=0.05)
        assert kernel == pytest.approx(reduced, rel=2e-2)
