"""Tests for state-space geometry of observables."""

import math

import numpy as np
import pytest

from core.exceptions import DomainError, NormalizationError
from core.grid import gaussian_packet
from core.operators import custom_op, momentum_op, position_op, values_of
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
from core.schemas import GridSpec


class TestFubiniStudyDistance:
    def test_distance_with_self_is_zero(self, random_unit):
        phi = random_unit()
        assert fubini_study_distance(phi, phi) == pytest.approx(0.0, abs=1e-7)

    def test_orthogonal_states(self):
        assert fubini_study_distance(np.array([1, 0]), np.array([0, 1])) == pytest.approx(math.pi / 2)

    def test_ignores_global_phase(self, random_unit):
        phi = random_unit()
        assert fubini_study_distance(phi, np.exp(0.7j) * phi) == pytest.approx(0.0, abs=1e-7)

    def test_rejects_non_unit_states(self):
        with pytest.raises(NormalizationError):
            fubini_study_distance(np.array([1.0, 1.0]), np.array([1.0, 0.0]))


class TestTangentDecomposition:
    def test_schrodinger_velocity(self, random_hermitian, random_unit):
        h = custom_op(random_hermitian())
        phi = random_unit()
        parts = decompose_tangent(h, phi)
        assert abs(parts.radial) < 1e-12
        assert parts.phase_parallel == pytest.approx(h.expectation(phi).real)
        assert np.allclose(parts.reconstruct(phi), -1j * values_of(h.apply(phi)))

    def test_projective_speed_is_uncertainty(self, random_hermitian, random_unit):
        h = custom_op(random_hermitian())
        phi = random_unit()
        assert projective_speed(h, phi) == pytest.approx(uncertainty(h, phi))

    def test_projective_accel_is_spread_of_square(self, random_hermitian, random_unit):
        h = custom_op(random_hermitian())
        phi = random_unit()
        assert projective_accel(h, phi) == pytest.approx(uncertainty(h.squared(), phi))

    def test_phase_parallel_acceleration_vanishes(self, random_hermitian, random_unit):
        h = custom_op(random_hermitian())
        assert phase_parallel_acceleration(h, random_unit()) == pytest.approx(0.0, abs=1e-8)

    def test_phase_parallel_acceleration_sees_non_hermitian_generator(self):
        # h = σz + 0.1i gives ψ_tt = (0.1 - iσz)²ψ, so Re(-iφ, ψ_tt) = 0.2⟨σz⟩
        h = custom_op(np.diag([1.0 + 0.1j, -1.0 + 0.1j]))
        phi = np.array([1.0, 0.0], dtype=complex)
        assert phase_parallel_acceleration(h, phi) == pytest.approx(0.2, abs=1e-6)

    def test_fs_speed_matches_uncertainty(self, random_hermitian, random_unit):
        h = custom_op(random_hermitian())
        measured, predicted = fs_speed_check(h, random_unit(), dt=1e-4)
        assert measured == pytest.approx(predicted, rel=1e-5)


class TestUncertainty:
    def test_relation_and_identity(self, random_hermitian, random_unit):
        a, b = custom_op(random_hermitian()), custom_op(random_hermitian())
        report = uncertainty_report(a, b, random_unit())
        assert report.product >= report.bound - 1e-12
        assert report.identity_gap < 1e-10

    def test_gaussian_saturates_canonical_pair(self, line_grid):
        psi = gaussian_packet(line_grid, sigma=1.0)
        report = uncertainty_report(position_op(line_grid), momentum_op(line_grid), psi)
        assert report.product == pytest.approx(0.5, abs=1e-3)
        assert report.bound == pytest.approx(0.5, abs=1e-3)

    def test_unitary_moves_keep_the_relation(self):
        grid = GridSpec.line(-10.0, 10.0, 801)
        reports = unitary_invariance_check(gaussian_packet(grid, sigma=1.0), n_unitaries=3, seed=5)
        assert len(reports) == 3
        for report in reports:
            assert report.product >= report.bound - 1e-9
            assert report.identity_gap < 1e-8

    def test_free_evolution_keeps_momentum_spread(self):
        grid = GridSpec.line(-10.0, 10.0, 801)
        drift = momentum_spread_conservation(gaussian_packet(grid, sigma=1.0, momentum=1.0), (0.0, 0.1), 1e-3)
        assert drift < 1e-6


class TestIdentities:
    def test_projection_identity(self, random_hermitian, random_unit):
        a, h = custom_op(random_hermitian()), custom_op(random_hermitian())
        lhs, rhs = projection_identity(a, h, random_unit())
        assert abs(lhs - rhs) < 1e-10

    def test_ehrenfest_finite_dimensional(self, random_hermitian, random_unit):
        a, h = custom_op(random_hermitian()), custom_op(random_hermitian())
        assert ehrenfest_check(a, h, random_unit(), (0.0, 0.5), 1e-3) < 1e-3

    def test_lie_bracket_of_canonical_fields(self, line_grid):
        psi = gaussian_packet(line_grid, sigma=1.0)
        bracket, direct = lie_bracket_check(position_op(line_grid), momentum_op(line_grid), psi)
        assert np.max(np.abs(bracket.values - direct.values)) < 1e-6

    def test_lie_bracket_needs_interior_state(self, line_grid):
        edge = gaussian_packet(line_grid, center=9.5, sigma=1.0)
        with pytest.raises(DomainError):
            lie_bracket_check(position_op(line_grid), momentum_op(line_grid), edge)
