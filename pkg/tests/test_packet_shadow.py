"""Tests for wave packets, shadows, collapse and the free propagator."""

import numpy as np
import pytest

from core.exceptions import DomainError, NoRealRootError, PolarDecompositionError, SingularityError
from core.grid import gaussian_packet, hermite_function
from core.operators import hamiltonian_op
from core.packet_shadow import (
    DEFAULT_GRID,
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
    polar_decompose,
    propagate_with_kernel,
    propagator_group_gap,
    propagator_residual,
    shadow_acceleration,
    shadow_velocity,
    spacetime_samples,
    stationary_trajectory,
    theorem1_residual,
)
from core.schemas import GridSpec, PacketParams, Potential, PotentialKind


@pytest.fixture
def accelerated() -> PacketParams:
    return PacketParams(sigma=1.0, m=1.0, v0=2.0, w=0.5)


class TestClosedForm:
    def test_packet_is_unit(self, accelerated):
        assert packet_closed_form(accelerated, 0.3).norm() == pytest.approx(1.0, abs=1e-10)

    def test_centre_and_width(self, accelerated):
        psi = packet_closed_form(accelerated, 0.4)
        assert expected_position(psi) == pytest.approx(accelerated.center(0.4), abs=1e-8)
        assert measured_width(psi) == pytest.approx(packet_width(accelerated, 0.4), abs=1e-8)

    def test_width_doubles_at_m_sigma_squared(self):
        p = PacketParams(sigma=1.5, m=2.0)
        assert packet_width(p, p.m * p.sigma**2) ** 2 == pytest.approx(2.0 * p.sigma**2)

    def test_packet_needs_margin(self):
        with pytest.raises(DomainError):
            packet_closed_form(PacketParams(x0=18.0), 0.0)


class TestShadow:
    def test_velocity_and_acceleration(self, accelerated):
        traj = closed_form_trajectory(accelerated, frames_around(0.0, 1e-3))
        assert shadow_velocity(traj, 0.0) == pytest.approx(-2.0, abs=1e-4)
        assert shadow_velocity(traj, 0.0, literal=True) == pytest.approx(2.0, abs=1e-4)
        assert shadow_acceleration(traj, 0.0) == pytest.approx(-0.5, abs=1e-3)

    def test_deceleration_reads_positive(self):
        traj = closed_form_trajectory(PacketParams(v0=2.0, w=-1.0), frames_around(0.0, 1e-3))
        assert shadow_acceleration(traj, 0.0) == pytest.approx(1.0, abs=1e-3)

    def test_polar_form_of_moving_packet(self):
        psi = packet_closed_form(PacketParams(v0=2.0), 0.0)
        polar = polar_decompose(psi)
        assert np.allclose(polar.reconstruct(), psi.values, atol=1e-12)
        centre = DEFAULT_GRID.n[0] // 2
        slope = np.gradient(polar.theta, DEFAULT_GRID.spacing[0])
        assert slope[centre] == pytest.approx(2.0, abs=1e-6)

    def test_polar_form_needs_non_vanishing_amplitude(self):
        with pytest.raises(PolarDecompositionError):
            polar_decompose(hermite_function(GridSpec.line(-10.0, 10.0, 401), 1))
        with pytest.raises(PolarDecompositionError):
            polar_decompose(packet_closed_form(PacketParams(), 0.0).with_values(np.zeros(DEFAULT_GRID.n[0])))

    def test_needs_neighbouring_frames(self, accelerated):
        traj = closed_form_trajectory(accelerated, frames_around(0.0, 1e-3))
        with pytest.raises(DomainError):
            shadow_velocity(traj, 2e-3)

    def test_generator_reading(self):
        psi = packet_closed_form(PacketParams(v0=2.0), 0.0)
        h = hamiltonian_op(DEFAULT_GRID)
        direct = generator_shadow_velocity(psi, h)
        assert generator_shadow_velocity(psi, h, orthogonal=True) == pytest.approx(direct, abs=1e-8)
        assert direct == pytest.approx(-2.0, abs=5e-3)


class TestCollapse:
    def test_width_reset_root(self):
        reset = collapse_width_reset(PacketParams(sigma=1.0, m=1.0), 0.3)
        assert reset.sigma**2 == pytest.approx(0.9, abs=1e-12)
        assert packet_width(reset, 0.0) == pytest.approx(1.0, abs=1e-12)
        assert reset.elapsed == 0.3

    def test_reset_advances_centre_and_velocity(self, accelerated):
        reset = collapse_width_reset(accelerated, 0.2)
        assert reset.x0 == pytest.approx(accelerated.center(0.2))
        assert reset.v0 == pytest.approx(accelerated.velocity(0.2))

    def test_interval_beyond_limit(self):
        with pytest.raises(NoRealRootError):
            collapse_width_reset(PacketParams(sigma=1.0, m=1.0), 0.6)

    def test_width_and_position_directions_are_orthogonal(self):
        assert abs(collapse_orthogonality(1.0, 0.7, DEFAULT_GRID)) < 1e-8


class TestMadelung:
    def test_closed_form_solves_both_equations(self, accelerated):
        traj = closed_form_trajectory(accelerated, frames_around(0.25, 1e-3))
        assert max(madelung_residuals(traj, 0.25)) < 1e-3

    def test_stationary_state(self):
        ground = hermite_function(DEFAULT_GRID, 0)
        oscillator = Potential(kind=PotentialKind.HARMONIC, strength=1.0)
        traj = stationary_trajectory(ground, 0.5, frames_around(0.0, 1e-3), potential=oscillator)
        continuity, _ = madelung_residuals(traj, 0.0)
        assert continuity < 1e-6


class TestCrankNicolson:
    def test_tracks_closed_form(self, accelerated):
        start = packet_closed_form(accelerated, 0.0)
        numeric = crank_nicolson_evolve(start, linear_potential(accelerated), (0.0, 0.1))
        reference = closed_form_trajectory(accelerated, numeric.times)
        assert np.max(np.abs(numeric.values - reference.values)) < 1e-3
        assert numeric.frame(numeric.times.size - 1).norm() == pytest.approx(1.0, abs=1e-8)

    def test_momentum_projection_split(self, accelerated):
        start = packet_closed_form(accelerated, 0.0)
        numeric = crank_nicolson_evolve(start, linear_potential(accelerated), (0.0, 0.05))
        lhs, rhs = momentum_projection_split(numeric, 0.025)
        assert lhs == pytest.approx(rhs, abs=1e-8)

    def test_store_every(self):
        start = packet_closed_form(PacketParams(), 0.0)
        traj = crank_nicolson_evolve(start, window=(0.0, 0.01), dt=1e-3, store_every=5)
        assert traj.times.tolist() == pytest.approx([0.0, 0.005, 0.01])

    def test_window_end_is_kept_off_cadence(self):
        start = packet_closed_form(PacketParams(), 0.0)
        sparse_frames = crank_nicolson_evolve(start, window=(0.0, 0.012), dt=1e-3, store_every=5)
        every_frame = crank_nicolson_evolve(start, window=(0.0, 0.012), dt=1e-3)
        assert sparse_frames.times.tolist() == pytest.approx([0.0, 0.005, 0.01, 0.012])
        assert np.allclose(sparse_frames.values[-1], every_frame.values[-1])
        with pytest.raises(DomainError):
            sparse_frames.index_of(0.01, reach=1)

    def test_explicit_hamiltonian_has_no_known_potential(self):
        start = packet_closed_form(PacketParams(), 0.0)
        h = hamiltonian_op(DEFAULT_GRID, 1.0, Potential(kind=PotentialKind.HARMONIC, strength=1.0))
        traj = crank_nicolson_evolve(start, window=(0.0, 0.01), dt=1e-3, hamiltonian=h)
        assert traj.potential is None
        with pytest.raises(DomainError):
            madelung_residuals(traj, 0.005)

    def test_explicit_hamiltonian_with_its_potential(self):
        start = packet_closed_form(PacketParams(), 0.0)
        oscillator = Potential(kind=PotentialKind.HARMONIC, strength=1.0)
        h = hamiltonian_op(DEFAULT_GRID, 1.0, oscillator)
        traj = crank_nicolson_evolve(start, oscillator, (0.0, 0.01), 1e-3, hamiltonian=h)
        assert traj.potential == oscillator
        madelung_residuals(traj, 0.005)

    def test_frame_table(self):
        start = packet_closed_form(PacketParams(), 0.0)
        traj = crank_nicolson_evolve(start, window=(0.0, 0.002), dt=1e-3)
        table = frame_table(traj, stride=2)
        assert table.columns == ["t", "x", "re_psi", "im_psi", "r", "theta"]
        assert len(table.rows) == 2 * DEFAULT_GRID.n[0]


class TestConstrainedPath:
    def test_solution_beats_frozen_state(self):
        moving = PacketParams(v0=2.0)
        solution = spacetime_samples(moving, (-10.0, 10.0, 401), (0.0, 1.0, 201))
        frozen = solution.with_values(np.repeat(solution.values[:, :1], 201, axis=1))
        assert theorem1_residual(solution, 0.5, 0.05) < 1e-2
        assert theorem1_residual(frozen, 0.5, 0.05) > 1e-1

    def test_tau_needs_margin(self):
        solution = spacetime_samples(PacketParams(), (-10.0, 10.0, 101), (0.0, 1.0, 51))
        with pytest.raises(DomainError):
            theorem1_residual(solution, 0.1, 0.05)


class TestPropagator:
    def test_solves_schrodinger(self):
        g = free_propagator(1.0, 0.5, 1.0, 0.0, 0.0)
        assert abs(propagator_residual(1.0, 0.5, 1.0, 0.0, 0.0)) / abs(g) < 1e-3

    def test_symmetric_in_space(self):
        assert free_propagator(1.0, 0.5, 1.0, 0.0, 0.0) == free_propagator(1.0, 0.0, 1.0, 0.5, 0.0)

    def test_singular_at_coincidence(self):
        with pytest.raises(SingularityError):
            free_propagator(1.0, 0.0, 0.05, 0.0, 0.0)

    def test_group_property(self):
        line = GridSpec.line(-10.0, 10.0, 801)
        assert propagator_group_gap(gaussian_packet(line, 0.0, 1.0, 1.0), 1.0, 1.0, 0.5, 0.0) < 1e-3

    def test_kernel_propagation_matches_closed_form(self):
        line = GridSpec.line(-10.0, 10.0, 801)
        p = PacketParams(v0=1.0)
        moved = propagate_with_kernel(packet_closed_form(p, 0.0, line), 1.0, 0.5, 0.0)
        reference = packet_closed_form(p, 0.5, line)
        interior = np.abs(line.axis(0)) < 5.0
        assert np.max(np.abs(moved.values - reference.values)[interior]) < 1e-3

    def test_kernel_propagation_refuses_short_gaps(self):
        line = GridSpec.line(-10.0, 10.0, 801)
        with pytest.raises(SingularityError):
            propagate_with_kernel(gaussian_packet(line), 1.0, 0.05, 0.0)
