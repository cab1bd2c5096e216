"""
Spin geodesics for Hilbert Embedding Lab.

A two-level system with ĥ_M = M - μB σ_z evolves along geodesics of the
unit sphere in ℂ² once the sphere carries the metric K = ĥ_M⁻². This
module evolves spin states, measures their K-speed and checks geodesy
variationally: the discrete energy Σ Re⟨KΔψ, Δψ⟩/dt must be stationary
under endpoint-fixed tangent perturbations.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from core.exceptions import DomainError, NormalizationError, SingularOperatorError
from core.schemas import TwoLevelSystem


logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12
DEFAULT_DT = 1e-4
DEFAULT_DELTA = 1e-4


@dataclass(frozen=True)
class SpinState:
    """
    Unit spinor (c₊, c₋) in the eigenbasis of σ_z.

    Raises:
        NormalizationError: If |c₊|² + |c₋|² differs from 1 by more than 1e-12
    """
    c_plus: complex
    c_minus: complex

    def __post_init__(self) -> None:
        norm2 = abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2
        if abs(norm2 - 1.0) > UNIT_TOL:
            raise NormalizationError(f"spin state has squared norm {norm2:.15g}")

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "SpinState":
        return cls(complex(vector[0]), complex(vector[1]))

    @classmethod
    def normalized(cls, c_plus: complex, c_minus: complex) -> "SpinState":
        norm = math.sqrt(abs(c_plus) ** 2 + abs(c_minus) ** 2)
        if norm == 0.0:
            raise NormalizationError("cannot normalize the zero spinor")
        return cls(complex(c_plus) / norm, complex(c_minus) / norm)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SpinState":
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        return cls.normalized(z[0], z[1])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_plus, self.c_minus], dtype=complex)


SpinLike = Union[SpinState, np.ndarray]


def _as_vector(psi: SpinLike) -> np.ndarray:
    if isinstance(psi, SpinState):
        return psi.vector
    return np.asarray(psi, dtype=complex).reshape(2)


def energy_levels(sys: TwoLevelSystem) -> np.ndarray:
    """Diagonal of ĥ_M: (M - μB, M + μB)."""
    return np.array([sys.M - sys.mu_B, sys.M + sys.mu_B])


def hamiltonian(sys: TwoLevelSystem) -> np.ndarray:
    """ĥ_M = M - μB σ_z as a 2×2 matrix."""
    return np.diag(energy_levels(sys)).astype(complex)


def metric_operator(sys: TwoLevelSystem) -> np.ndarray:
    """
    K = ĥ_M⁻² = diag(1/(M - μB)², 1/(M + μB)²).

    Raises:
        SingularOperatorError: If M = ±μB
    """
    levels = energy_levels(sys)
    if np.any(np.isclose(levels, 0.0, rtol=0.0, atol=1e-14)):
        raise SingularOperatorError(
            f"ĥ_M is singular for M={sys.M}, μB={sys.mu_B}"
        )
    return np.diag(1.0 / levels**2)


def evolve_spin(sys: TwoLevelSystem, psi0: SpinState, t: float) -> SpinState:
    """
    Exact Schrödinger evolution under ĥ_M.

    Returns (c₊ e^{-i(M-μB)t}, c₋ e^{-i(M+μB)t}).
    """
    phases = np.exp(-1j * energy_levels(sys) * t)
    c_plus, c_minus = psi0.vector * phases
    return SpinState(complex(c_plus), complex(c_minus))


def neighboring_point(sys: TwoLevelSystem, psi0: SpinState) -> SpinState:
    """State after one rest-energy period t = 2π/M."""
    return evolve_spin(sys, psi0, 2.0 * math.pi / sys.M)


def k_speed(sys: TwoLevelSystem, psi: SpinLike) -> float:
    """‖-iĥ_M ψ‖_K with K = ĥ_M⁻²; equals ‖ψ‖."""
    vector = _as_vector(psi)
    velocity = -1j * energy_levels(sys) * vector
    metric = np.diag(metric_operator(sys))
    return math.sqrt(float(np.real(np.vdot(velocity, metric * velocity))))


def ellipsoid_embedding(sys: TwoLevelSystem, psi: SpinLike) -> np.ndarray:
    """
    Real coordinates of ĥ_M⁻¹ψ in ℝ⁴.

    Unit states land on the ellipsoid Σ (M ∓ μB)² (x² + y²) = 1.
    """
    xi = _as_vector(psi) / energy_levels(sys)
    return np.array([xi[0].real, xi[0].imag, xi[1].real, xi[1].imag])


def ellipsoid_residual(sys: TwoLevelSystem, coords: np.ndarray) -> float:
    axes = np.repeat(energy_levels(sys), 2)
    return abs(float(np.sum((axes * coords) ** 2)) - 1.0)


def spin_path(
    sys: TwoLevelSystem,
    psi0: SpinState,
    window: tuple[float, float],
    dt: float = DEFAULT_DT
) -> np.ndarray:
    """Exact solution sampled on a uniform grid, shape (n, 2)."""
    t0, t1 = window
    steps = max(2, int(round((t1 - t0) / dt)))
    times = np.linspace(t0, t1, steps + 1)
    return psi0.vector[None, :] * np.exp(-1j * np.outer(times, energy_levels(sys)))


def chord_path(start: SpinLike, end: SpinLike, n: int) -> np.ndarray:
    """Straight chord between two states, renormalized onto the sphere."""
    s = np.linspace(0.0, 1.0, n)[:, None]
    path = (1.0 - s) * _as_vector(start)[None, :] + s * _as_vector(end)[None, :]
    return path / np.linalg.norm(path, axis=1, keepdims=True)


def _tangent_bump(path: np.ndarray, rng: np.random.Generator, modes: int = 4) -> np.ndarray:
    """Random endpoint-fixed tangent field with sup-norm 1."""
    s = np.linspace(0.0, 1.0, path.shape[0])
    profiles = np.sin(np.outer(s, np.arange(1, modes + 1)) * math.pi)
    coefficients = rng.standard_normal((modes, 2)) + 1j * rng.standard_normal((modes, 2))
    eta = profiles @ coefficients
    radial = np.real(np.sum(np.conj(path) * eta, axis=1))
    eta = eta - radial[:, None] * path
    return eta / np.max(np.linalg.norm(eta, axis=1))


def perturbed_path(path: np.ndarray, size: float, seed: int = 0) -> np.ndarray:
    """Path displaced by a fixed random tangent bump, renormalized."""
    eta = _tangent_bump(path, np.random.default_rng(seed))
    moved = path + size * eta
    return moved / np.linalg.norm(moved, axis=1, keepdims=True)


def discrete_energy(sys: TwoLevelSystem, path: np.ndarray, dt: float) -> float:
    """Σ_k Re⟨KΔψ_k, Δψ_k⟩ / dt."""
    metric = np.diag(metric_operator(sys))
    steps = np.diff(path, axis=0)
    return float(np.sum(np.real(np.conj(steps) * metric * steps)) / dt)


def geodesic_residual(
    sys: TwoLevelSystem,
    psi0: SpinState,
    window: tuple[float, float],
    dt: float = DEFAULT_DT,
    delta: float = DEFAULT_DELTA,
    n_perturbations: int = 16,
    seed: int = 0,
    path: Optional[np.ndarray] = None
) -> float:
    """
    Largest first variation of the discrete energy.

    Algorithm:
    1. Sample the path (the exact solution unless one is supplied)
    2. Draw random tangent bumps η that vanish at both endpoints
    3. Return max |E(ψ + δη) - E(ψ - δη)| / 2δ

    Raises:
        DomainError: If dt exceeds 1e-3 of the fastest period 2π/(M + |μB|)
    """
    limit = 1e-3 * 2.0 * math.pi / (sys.M + abs(sys.mu_B))
    if dt > limit * (1.0 + 1e-12):
        raise DomainError(f"dt={dt:g} exceeds the resolution limit {limit:.3g}")
    if path is None:
        path = spin_path(sys, psi0, window, dt)
    rng = np.random.default_rng(seed)
    residual = 0.0
    for _ in range(n_perturbations):
        eta = _tangent_bump(path, rng)
        plus = discrete_energy(sys, path + delta * eta, dt)
        minus = discrete_energy(sys, path - delta * eta, dt)
        residual = max(residual, abs(plus - minus) / (2.0 * delta))
    logger.debug("geodesic residual %.3e over %d bumps", residual, n_perturbations)
    return residual
