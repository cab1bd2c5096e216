"""Tests for grid and finite-dimensional observables."""

import numpy as np
import pytest
from scipy.sparse.linalg import norm as sparse_norm

from core.exceptions import ShapeError
from core.grid import gaussian_packet
from core.operators import (
    braket,
    custom_op,
    hamiltonian_op,
    momentum_op,
    norm,
    pauli_op,
    position_op,
)
from core.schemas import GridSpec, Potential, PotentialKind


class TestGridObservables:
    def test_position_expectation(self, line_grid):
        psi = gaussian_packet(line_grid, center=1.0, sigma=0.8)
        assert position_op(line_grid).expectation(psi).real == pytest.approx(1.0, abs=1e-8)

    def test_momentum_expectation(self, line_grid):
        psi = gaussian_packet(line_grid, sigma=1.0, momentum=1.0)
        assert momentum_op(line_grid).expectation(psi).real == pytest.approx(1.0, abs=1e-3)

    def test_canonical_commutator(self, line_grid):
        psi = gaussian_packet(line_grid, sigma=1.0)
        bracket = position_op(line_grid).commutator(momentum_op(line_grid))
        assert abs(bracket.expectation(psi) - 1j) < 1e-3

    def test_hamiltonian_is_hermitian(self, line_grid):
        h = hamiltonian_op(line_grid, 2.0, Potential(kind=PotentialKind.HARMONIC, strength=1.0))
        assert sparse_norm(h.matrix - h.matrix.conj().T) < 1e-12

    def test_oscillator_ground_energy(self, line_grid):
        h = hamiltonian_op(line_grid, 1.0, Potential(kind=PotentialKind.HARMONIC, strength=1.0))
        psi = gaussian_packet(line_grid, sigma=1.0)
        assert h.expectation(psi).real == pytest.approx(0.5, abs=1e-4)

    def test_rejects_plane_grids(self):
        with pytest.raises(ShapeError):
            position_op(GridSpec(dim=2, lo=-1.0, hi=1.0, n=17))


class TestMatrixObservables:
    def test_pauli_commutator(self):
        bracket = pauli_op("x").commutator(pauli_op("y"))
        assert np.allclose(bracket.matrix, 2j * pauli_op("z").matrix)

    def test_anticommutator_of_distinct_paulis_vanishes(self):
        assert np.allclose(pauli_op("y").anticommutator(pauli_op("z")).matrix, 0.0)

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            custom_op(np.ones((2, 3)))

    def test_apply_checks_dimension(self):
        with pytest.raises(ShapeError):
            pauli_op("x").apply(np.ones(3))

    def test_braket_is_antilinear_in_first_slot(self, random_unit):
        phi, psi = random_unit(3), random_unit(3)
        assert braket(2j * phi, psi) == pytest.approx(-2j * braket(phi, psi))
        assert norm(phi) == pytest.approx(1.0)
