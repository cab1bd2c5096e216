"""Tests for the Born rule on delta states and diffusion collapse."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import unitary_group

from core.born_collapse import (
    DEFAULT_GRID,
    ProjectivePoint,
    born_normal_identity,
    born_probability,
    born_sweep,
    diffuse_walk,
    manifold_targets,
    normal_density_check,
    oscillator_basis,
    project_to_modes,
)
from core.exceptions import NonErgodicError, NormalizationError, ShapeError
from core.grid import hermite_function, trapezoid_weights
from core.schemas import WalkConfig


E1 = ProjectivePoint.normalized([1.0, 0.0])
E2 = ProjectivePoint.normalized([0.0, 1.0])


class TestBornRule:
    @pytest.mark.parametrize("separation", [0.0, 0.5, 1.5, 3.0])
    def test_normal_identity(self, separation):
        lhs, rhs, gap = born_normal_identity(1.0, 0.0, separation)
        assert lhs == pytest.approx(math.exp(-separation**2 / 2.0))
        assert gap < 1e-10

    def test_sweep_table(self):
        table = born_sweep(1.0, 21, 4.0)
        assert table.name == "born_sweep"
        assert table.columns == ["separation", "lhs", "rhs", "gap"]
        assert len(table.rows) == 21
        assert table.rows[0][1] == pytest.approx(1.0)
        assert table.rows[-1][0] == pytest.approx(4.0)

    def test_normal_density_three_dimensions(self):
        density, reference = normal_density_check(0.8, [0.0, 1.0, -1.0], [0.5, 0.0, 0.25])
        assert density == pytest.approx(reference, rel=1e-12)

    def test_normal_density_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            normal_density_check(1.0, [0.0, 1.0], 0.0)

    def test_probability_of_projective_points(self):
        assert born_probability(ProjectivePoint.on_cp1(0.7), E1) == pytest.approx(0.7)


class TestProjectivePoint:
    def test_rejects_non_unit(self):
        with pytest.raises(NormalizationError):
            ProjectivePoint(np.array([1.0, 1.0]))

    def test_distance(self):
        start = ProjectivePoint.on_cp1(0.3)
        assert start.distance(E2) == pytest.approx(math.acos(math.sqrt(0.7)))

    def test_overlaps_survive_unitaries(self):
        u = unitary_group.rvs(2, random_state=3)
        start = ProjectivePoint.on_cp1(0.8, phase=0.4)
        assert start.transformed(u).overlap(E1.transformed(u)) == pytest.approx(start.overlap(E1))

    def test_manifold_targets_in_oscillator_modes(self):
        targets = manifold_targets([0.0, 0.5], 1.0, DEFAULT_GRID, 8)
        assert targets[0].n_modes == 8
        assert abs(targets[0].amplitudes[0]) == pytest.approx(1.0, abs=1e-10)
        assert targets[0].overlap(targets[1]) ** 2 == pytest.approx(math.exp(-0.125), abs=1e-3)


    def test_oscillator_basis_is_orthonormal(self):
        basis = oscillator_basis(DEFAULT_GRID, 6)
        assert basis.shape == (6, DEFAULT_GRID.n[0])
        gram = (basis * trapezoid_weights(DEFAULT_GRID)) @ basis.conj().T
        assert np.allclose(gram, np.eye(6), atol=1e-8)

    def test_ground_mode_projects_onto_first_amplitude(self):
        point = project_to_modes(hermite_function(DEFAULT_GRID, 0), oscillator_basis(DEFAULT_GRID, 6))
        assert abs(point.amplitudes[0]) == pytest.approx(1.0, abs=1e-10)
        assert np.allclose(point.amplitudes[1:], 0.0, atol=1e-8)

class TestDiffuseWalk:
    def test_start_on_target(self):
        report = diffuse_walk(E1, [E1, E2], WalkConfig(n_trials=50, seed=1))
        assert report.targets[0].frequency == 1.0
        assert report.mean_steps == 0.0

    def test_batching_does_not_change_outcomes(self):
        start = ProjectivePoint.on_cp1(0.8)
        serial = diffuse_walk(start, [E1, E2], WalkConfig(n_trials=120, seed=9, batch_size=120))
        batched = diffuse_walk(start, [E1, E2], WalkConfig(n_trials=120, seed=9, batch_size=32))
        assert serial.model_dump() == batched.model_dump()

    def test_wilson_interval_brackets_frequency(self):
        report = diffuse_walk(ProjectivePoint.on_cp1(0.8), [E1, E2], WalkConfig(n_trials=120, seed=2))
        hit = report.targets[0]
        assert hit.ci_low <= hit.frequency <= hit.ci_high
        assert sum(target.hits for target in report.targets) == report.n_absorbed

    def test_born_reference_is_normalized(self):
        report = diffuse_walk(ProjectivePoint.on_cp1(0.8), [E1, E2], WalkConfig(n_trials=100, seed=4))
        assert report.targets[0].born_reference == pytest.approx(0.8)
        assert report.targets[1].born_reference == pytest.approx(0.2)

    def test_step_budget_exhausted(self):
        cfg = WalkConfig(n_trials=10, max_steps=1)
        with pytest.raises(NonErgodicError):
            diffuse_walk(ProjectivePoint.on_cp1(0.5), [E1, E2], cfg)

    def test_mode_spaces_must_match(self):
        with pytest.raises(ShapeError):
            diffuse_walk(E1, [ProjectivePoint.normalized([1.0, 0.0, 0.0])], WalkConfig(n_trials=10))

    def test_absorption_radius_within_step(self):
        with pytest.raises(ValidationError):
            WalkConfig(step_len=0.02, absorb_tol=0.05)
