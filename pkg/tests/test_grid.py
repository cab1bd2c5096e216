"""Tests for grids, states and inner products."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.exceptions import DomainError, NormalizationError, ShapeError
from core.grid import (
    StateFunction,
    evaluate_kernel,
    hermite_function,
    inner_kernel,
    inner_l2,
    make_nascent_delta,
    make_tilde_delta,
    window_grid,
)
from core.schemas import GridSpec, KernelKind, KernelSpec


class TestGridSpec:
    def test_line_spacing(self):
        grid = GridSpec.line(-1.0, 1.0, 201)
        assert grid.spacing == pytest.approx((0.01,))
        assert grid.shape == (201,)

    def test_scalars_broadcast_to_every_axis(self):
        grid = GridSpec(dim=2, lo=-1.0, hi=1.0, n=17)
        assert grid.lo == (-1.0, -1.0)
        assert grid.n == (17, 17)

    def test_rejects_coarse_axes(self):
        with pytest.raises(ValidationError):
            GridSpec.line(0.0, 1.0, 8)

    def test_rejects_empty_interval(self):
        with pytest.raises(ValidationError):
            GridSpec.line(1.0, 1.0, 32)

    def test_contains_respects_margin(self):
        grid = GridSpec.line(-5.0, 5.0, 101)
        assert grid.contains(0.0, 4.0)
        assert not grid.contains(4.5, 1.0)


class TestStateFunction:
    def test_values_are_read_only(self, line_grid):
        state = make_tilde_delta(0.0, 1.0, line_grid)
        with pytest.raises(ValueError):
            state.values[0] = 1.0

    def test_wrong_sample_count(self, line_grid):
        with pytest.raises(ShapeError):
            StateFunction(line_grid, np.zeros(10))

    def test_zero_state_cannot_be_normalized(self, line_grid):
        with pytest.raises(NormalizationError):
            StateFunction.zeros(line_grid).normalized()

    def test_mismatched_grids(self, line_grid):
        other = GridSpec.line(-10.0, 10.0, 1001)
        with pytest.raises(ShapeError):
            inner_l2(make_tilde_delta(0.0, 1.0, line_grid), make_tilde_delta(0.0, 1.0, other))


class TestDeltaStates:
    def test_tilde_delta_is_unit(self, line_grid):
        assert make_tilde_delta(1.5, 0.7, line_grid).norm() == pytest.approx(1.0, abs=1e-10)

    def test_tilde_delta_overlap(self, line_grid):
        a = make_tilde_delta(0.0, 1.0, line_grid)
        b = make_tilde_delta(1.0, 1.0, line_grid)
        assert inner_l2(a, b).real == pytest.approx(math.exp(-0.25), abs=1e-10)

    def test_tilde_delta_needs_margin(self, line_grid):
        with pytest.raises(DomainError):
            make_tilde_delta(8.0, 1.0, line_grid)

    def test_nascent_delta_has_unit_mass(self, line_grid):
        state = make_nascent_delta(0.0, 0.2, line_grid)
        mass = float(np.sum(state.values.real) * line_grid.spacing[0])
        assert mass == pytest.approx(1.0, abs=1e-10)

    def test_hermite_ground_state_is_tilde_delta(self, line_grid):
        ground = hermite_function(line_grid, 0, 0.5, 1.2)
        delta = make_tilde_delta(0.5, 1.2, line_grid)
        assert np.allclose(ground.values, delta.values, atol=1e-14)

    def test_hermite_functions_are_orthonormal(self, line_grid):
        states = [hermite_function(line_grid, k) for k in range(4)]
        gram = np.array([[inner_l2(f, g) for g in states] for f in states])
        assert np.allclose(gram, np.eye(4), atol=1e-10)


class TestKernels:
    def test_euclid_kernel_at_coincidence(self):
        k = KernelSpec(kind=KernelKind.EUCLID, scale=2.0)
        assert float(evaluate_kernel(k, 0.3, 0.3)) == pytest.approx(1.0)

    def test_normalized_coefficient(self):
        k = KernelSpec(kind=KernelKind.EUCLID, scale=2.0, normalized=True)
        assert float(evaluate_kernel(k, 0.0, 0.0)) == pytest.approx(2.0 / math.sqrt(2.0 * math.pi))

    def test_spacetime_kernel_needs_pairs(self):
        with pytest.raises(ShapeError):
            evaluate_kernel(KernelSpec(kind=KernelKind.MINKOWSKI), [0.0], [0.0])

    def test_curved_kernel_requires_potential(self):
        with pytest.raises(ValidationError):
            KernelSpec(kind=KernelKind.CURVED)

    def test_nascent_delta_kernel_square(self):
        # ∫∫ e^{-(x-y)²/2} φ(x)φ(y) for unit-mass Gaussians of width ε
        eps = 0.05
        local = window_grid(0.0, 12.0 * eps, eps / 3.0)
        phi = make_nascent_delta(0.0, eps, local)
        value = inner_kernel(phi, phi, KernelSpec()).real
        assert value == pytest.approx(1.0 / math.sqrt(1.0 + 2.0 * eps**2), rel=1e-8)

    def test_spacetime_kernel_rejects_line_grid(self, line_grid):
        phi = make_tilde_delta(0.0, 1.0, line_grid)
        with pytest.raises(ShapeError):
            inner_kernel(phi, phi, KernelSpec(kind=KernelKind.MINKOWSKI))
