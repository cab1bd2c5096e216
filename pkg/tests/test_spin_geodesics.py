"""Tests for the two-level system and its geodesic property."""

import cmath
import math

import numpy as np
import pytest

from core.exceptions import DomainError, NormalizationError, SingularOperatorError
from core.schemas import TwoLevelSystem
from core.spin_geodesics import (
    SpinState,
    chord_path,
    ellipsoid_embedding,
    ellipsoid_residual,
    evolve_spin,
    geodesic_residual,
    k_speed,
    metric_operator,
    neighboring_point,
    perturbed_path,
    spin_path,
)


@pytest.fixture
def system() -> TwoLevelSystem:
    return TwoLevelSystem(M=10.0, mu_B=1.0)


class TestSpinState:
    def test_rejects_non_unit(self):
        with pytest.raises(NormalizationError):
            SpinState(1.0, 1.0)

    def test_normalized(self):
        state = SpinState.normalized(3.0, 4.0j)
        assert abs(state.c_plus) ** 2 + abs(state.c_minus) ** 2 == pytest.approx(1.0)


class TestEvolution:
    def test_metric_operator_is_inverse_square(self, system):
        assert np.allclose(np.diag(metric_operator(system)), [1.0 / 81.0, 1.0 / 121.0])

    def test_singular_hamiltonian(self):
        with pytest.raises(SingularOperatorError):
            metric_operator(TwoLevelSystem(M=1.0, mu_B=1.0))

    def test_k_speed_is_unit(self, system, rng):
        state = SpinState.random(rng)
        for t in (0.0, 0.3, 1.7):
            assert k_speed(system, evolve_spin(system, state, t)) == pytest.approx(1.0, abs=1e-12)

    def test_ellipsoid_embedding(self, system, rng):
        state = evolve_spin(system, SpinState.random(rng), 0.4)
        assert ellipsoid_residual(system, ellipsoid_embedding(system, state)) < 1e-12

    def test_neighboring_point_phases(self, system):
        start = SpinState.normalized(1.0, 1.0)
        moved = neighboring_point(system, start)
        phase = cmath.exp(2j * math.pi * system.mu_B / system.M)
        assert moved.c_plus == pytest.approx(phase * start.c_plus, abs=1e-12)
        assert moved.c_minus == pytest.approx(phase.conjugate() * start.c_minus, abs=1e-12)

    def test_path_starts_at_initial_state(self, system, rng):
        state = SpinState.random(rng)
        path = spin_path(system, state, (0.0, 0.1), 1e-3)
        assert path.shape == (101, 2)
        assert np.allclose(path[0], state.vector)


class TestGeodesicResidual:
    def test_exact_path_is_stationary(self, system, rng):
        state = SpinState.random(rng)
        assert geodesic_residual(system, state, (0.0, 0.5), n_perturbations=4, seed=3) < 1e-6

    def test_coarse_time_step_is_rejected(self, system, rng):
        with pytest.raises(DomainError):
            geodesic_residual(system, SpinState.random(rng), (0.0, 0.5), dt=1e-2)


class TestComparisonPaths:
    @pytest.fixture
    def chord(self) -> np.ndarray:
        return chord_path(np.array([1.0, 0.0]), np.array([0.0, 1.0j]), 21)

    def test_chord_stays_on_sphere(self, chord):
        assert np.allclose(np.linalg.norm(chord, axis=1), 1.0)
        assert np.allclose(chord[0], [1.0, 0.0])
        assert np.allclose(chord[-1], [0.0, 1.0j])

    def test_bump_keeps_endpoints(self, chord):
        moved = perturbed_path(chord, 0.1, seed=4)
        assert np.allclose(np.linalg.norm(moved, axis=1), 1.0)
        assert np.allclose(moved[[0, -1]], chord[[0, -1]])
        assert np.max(np.abs(moved[1:-1] - chord[1:-1])) > 1e-3

    def test_bump_is_fixed_by_seed(self, chord):
        assert np.array_equal(perturbed_path(chord, 0.1, seed=4), perturbed_path(chord, 0.1, seed=4))
        assert not np.allclose(perturbed_path(chord, 0.1, seed=4), perturbed_path(chord, 0.1, seed=5))
