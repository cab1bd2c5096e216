"""
Quantum geometry for Hilbert Embedding Lab.

Observables become vector fields φ ↦ -iÂφ on the sphere of unit states.
The real part of the inner product is a Riemannian metric on that sphere;
this module measures the radial, phase-parallel and orthogonal parts of
tangent vectors, the uncertainty relation and identity, the Ehrenfest
and projection identities, and the projective (Fubini-Study) speed and
acceleration of Schrödinger evolution.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import expm_multiply

from core.exceptions import DomainError, NormalizationError
from core.grid import StateFunction
from core.operators import (
    ObservableOp,
    ObservableKind,
    State,
    braket,
    like,
    momentum_op,
    norm,
    position_op,
    values_of,
)
from core.packet_shadow import crank_nicolson_evolve


logger = logging.getLogger(__name__)

UNIT_TOL = 1e-8
FIELD_STEP = 1e-5
EDGE_SAMPLES = 5
EDGE_FLOOR = 1e-8


@dataclass(frozen=True)
class TangentDecomposition:
    """
    v = radial·φ + phase_parallel·(-iφ) + orthogonal.

    Attributes:
        radial: Component along φ (real for tangent vectors of the sphere)
        phase_parallel: Component along the phase direction -iφ
        orthogonal: Remainder, orthogonal to both φ and -iφ
    """
    radial: complex
    phase_parallel: float
    orthogonal: State

    def reconstruct(self, phi: State) -> np.ndarray:
        return (
            self.radial * values_of(phi)
            + self.phase_parallel * (-1j) * values_of(phi)
            + values_of(self.orthogonal)
        )


@dataclass(frozen=True)
class UncertaintyReport:
    """Uncertainty relation and identity for a pair of observables at φ."""
    delta_a: float
    delta_b: float
    bound: float
    area: float
    metric: float
    identity_gap: float

    @property
    def product(self) -> float:
        return self.delta_a * self.delta_b


def _require_unit(state: State, what: str = "state") -> None:
    value = norm(state)
    if abs(value - 1.0) > UNIT_TOL:
        raise NormalizationError(f"{what} has norm {value:.12g}, expected 1")


def decompose_vector(phi: State, v: State) -> TangentDecomposition:
    """Split a vector at φ into radial, phase and orthogonal parts."""
    overlap = braket(phi, v)
    orthogonal = like(phi, values_of(v) - overlap * values_of(phi))
    return TangentDecomposition(
        radial=complex(overlap.real),
        phase_parallel=float((1j * overlap).real),
        orthogonal=orthogonal,
    )


def decompose_tangent(h: ObservableOp, phi: State) -> TangentDecomposition:
    """
    Decompose the Schrödinger velocity -iĥφ.

    The radial part vanishes, the phase-parallel part is Ē = ⟨ĥ⟩ and the
    orthogonal part is -iĥ_⊥φ = -i(ĥ - Ē)φ.
    """
    velocity = like(phi, -1j * values_of(h.apply(phi)))
    return decompose_vector(phi, velocity)


def uncertainty(a: ObservableOp, phi: State) -> float:
    """ΔA = ‖-iÂ_⊥φ‖ = ‖Âφ - ⟨Â⟩φ‖."""
    applied = values_of(a.apply(phi))
    mean = braket(phi, a.apply(phi)).real
    return norm(like(phi, applied - mean * values_of(phi)))


def projective_speed(h: ObservableOp, phi: State) -> float:
    """Speed of the projected evolution, ‖-iĥ_⊥φ‖ = Δh."""
    return norm(decompose_tangent(h, phi).orthogonal)


def acceleration_decomposition(h: ObservableOp, phi: State) -> TangentDecomposition:
    """Decompose -ĥ²φ; its phase-parallel part vanishes for Hermitian ĥ."""
    h2_phi = h.apply(h.apply(phi))
    return decompose_vector(phi, like(phi, -values_of(h2_phi)))


def projective_accel(h: ObservableOp, phi: State) -> float:
    """‖-ĥ²_⊥φ‖ = Δ(h²)."""
    return norm(acceleration_decomposition(h, phi).orthogonal)


def fubini_study_distance(phi: State, psi: State) -> float:
    """
    ρ = arccos |⟨φ, ψ⟩|, in [0, π/2].

    Raises:
        NormalizationError: If either state is not unit within 1e-8
    """
    _require_unit(phi, "phi")
    _require_unit(psi, "psi")
    overlap = min(abs(braket(phi, psi)), 1.0)
    return math.acos(overlap)


def evolve(h: ObservableOp, phi: State, t: float) -> State:
    """e^{-iĥt}φ, by expm_multiply on grids and expm for matrices."""
    if sparse.issparse(h.matrix):
        return like(phi, expm_multiply(-1j * t * h.matrix.tocsc(), values_of(phi)))
    return like(phi, linalg.expm(-1j * t * np.asarray(h.matrix)) @ values_of(phi))


def fs_speed_check(h: ObservableOp, phi: State, dt: float = 1e-4) -> tuple[float, float]:
    """
    Projective speed two ways.

    Returns (ρ(φ, φ_dt)/dt, Δh); the two agree to O(dt²).
    """
    moved = evolve(h, phi, dt)
    return fubini_study_distance(phi, moved) / dt, projective_speed(h, phi)


def _field(op: ObservableOp, phi: State) -> np.ndarray:
    return -1j * values_of(op.apply(phi))


def _check_interior(phi: State) -> None:
    if not isinstance(phi, StateFunction):
        return
    magnitude = np.abs(phi.values.ravel())
    peak = float(np.max(magnitude))
    edges = np.concatenate([magnitude[:EDGE_SAMPLES], magnitude[-EDGE_SAMPLES:]])
    if peak == 0.0 or float(np.max(edges)) > EDGE_FLOOR * peak:
        raise DomainError(f"state is not negligible within {EDGE_SAMPLES} samples of the edge")


def lie_bracket_check(
    a: ObservableOp,
    b: ObservableOp,
    phi: State,
    step: float = FIELD_STEP
) -> tuple[State, State]:
    """
    Bracket of the fields X = -iÂφ, Y = -iB̂φ against [Â, B̂]φ.

    Algorithm:
    1. DY[X] = (Y(φ + sX) - Y(φ - sX)) / 2s, and DX[Y] likewise
    2. [X, Y](φ) = DY[X] - DX[Y]
    3. Compare with the commutator applied directly

    Raises:
        DomainError: If φ reaches the first or last 5 grid samples
    """
    _check_interior(phi)
    base = values_of(phi)
    x_field = _field(a, phi)
    y_field = _field(b, phi)

    def along(op: ObservableOp, direction: np.ndarray) -> np.ndarray:
        ahead = _field(op, like(phi, base + step * direction))
        behind = _field(op, like(phi, base - step * direction))
        return (ahead - behind) / (2.0 * step)

    bracket = along(b, x_field) - along(a, y_field)
    direct = values_of(a.commutator(b).apply(phi))
    return like(phi, bracket), like(phi, direct)


def uncertainty_report(a: ObservableOp, b: ObservableOp, phi: State) -> UncertaintyReport:
    """
    Uncertainty relation and identity.

    With X = -iÂ_⊥φ, Y = -iB̂_⊥φ and G(X, Y) = Re⟨X, Y⟩:
    ΔA·ΔB ≥ ½|⟨[Â, B̂]⟩| and ΔA²ΔB² = area² + G², where area is the
    parallelogram area spanned by X and Y.
    """
    x_vec = values_of(decompose_tangent(a, phi).orthogonal)
    y_vec = values_of(decompose_tangent(b, phi).orthogonal)
    delta_a = norm(like(phi, x_vec))
    delta_b = norm(like(phi, y_vec))
    metric = braket(like(phi, x_vec), like(phi, y_vec)).real
    if delta_a > 0.0:
        rejection = y_vec - (metric / delta_a**2) * x_vec
        area = delta_a * norm(like(phi, rejection))
    else:
        area = 0.0
    bound = 0.5 * abs(a.commutator(b).expectation(phi))
    gap = abs(delta_a**2 * delta_b**2 - area**2 - metric**2)
    return UncertaintyReport(
        delta_a=delta_a, delta_b=delta_b, bound=bound,
        area=area, metric=metric, identity_gap=gap,
    )


def _expectation_series(a: ObservableOp, frames: list[State]) -> np.ndarray:
    return np.array([a.expectation(frame).real for frame in frames])


def _frames(h: ObservableOp, phi0: State, window: tuple[float, float], dt: float) -> list[State]:
    if isinstance(phi0, StateFunction):
        traj = crank_nicolson_evolve(phi0, window=window, dt=dt, hamiltonian=h)
        return [traj.frame(i) for i in range(traj.times.size)]
    steps = max(2, int(round((window[1] - window[0]) / dt)))
    step = linalg.expm(-1j * ((window[1] - window[0]) / steps) * np.asarray(h.matrix))
    frames = [evolve(h, phi0, window[0])]
    for _ in range(steps):
        frames.append(step @ frames[-1])
    return frames


def ehrenfest_check(
    a: ObservableOp,
    h: ObservableOp,
    phi0: State,
    window: tuple[float, float] = (0.0, 0.5),
    dt: float = 1e-3
) -> float:
    """
    Max gap between d⟨A⟩/dt and -i⟨[Â, ĥ]⟩ along the evolution.

    Grid states are propagated by Crank-Nicolson; the time derivative is
    a centred difference between neighbouring frames.
    """
    frames = _frames(h, phi0, window, dt)
    step = (window[1] - window[0]) / (len(frames) - 1)
    means = _expectation_series(a, frames)
    rates = (means[2:] - means[:-2]) / (2.0 * step)
    bracket = a.commutator(h)
    predicted = np.array([(-1j * bracket.expectation(frame)).real for frame in frames[1:-1]])
    gap = float(np.max(np.abs(rates - predicted)))
    logger.debug("ehrenfest gap %.3e over %d frames", gap, len(frames))
    return gap


def projection_identity(a: ObservableOp, h: ObservableOp, phi: State) -> tuple[complex, complex]:
    """
    2(dφ/dt, -iÂφ) against ⟨{Â, ĥ}⟩ - ⟨[Â, ĥ]⟩, with dφ/dt = -iĥφ.

    The pairing is the Hermitian product ⟨-iĥφ, -iÂφ⟩ = ⟨ĥφ, Âφ⟩.
    """
    lhs = 2.0 * braket(h.apply(phi), a.apply(phi))
    rhs = a.anticommutator(h).expectation(phi) - a.commutator(h).expectation(phi)
    return lhs, rhs


def _canonical_generators(grid_state: StateFunction) -> list[sparse.csr_matrix]:
    x = position_op(grid_state.grid).matrix
    p = momentum_op(grid_state.grid).matrix
    return [x @ x, 0.5 * (x @ p + p @ x), p @ p, x, p]


def unitary_invariance_check(
    phi: StateFunction,
    n_unitaries: int = 20,
    seed: int = 0,
    scale: float = 0.3
) -> list[UncertaintyReport]:
    """
    Uncertainty of the canonical pair after random unitaries.

    Each U = e^{-iG} uses a random quadratic generator
    G = a x² + b (xp+px)/2 + c p² + d x + e p with coefficients in
    [-scale, scale]. Since ⟨Uφ, Â Uφ⟩ = ⟨φ, U†ÂU φ⟩, the report for Uφ is
    the report for the conjugated pair at φ.
    """
    rng = np.random.default_rng(seed)
    x_op = position_op(phi.grid)
    p_op = momentum_op(phi.grid)
    generators = _canonical_generators(phi)
    reports = []
    for _ in range(n_unitaries):
        coefficients = rng.uniform(-scale, scale, len(generators))
        generator = sum(c * g for c, g in zip(coefficients, generators))
        moved = ObservableOp(ObservableKind.CUSTOM, generator.tocsr(), phi.grid, "G")
        reports.append(uncertainty_report(x_op, p_op, evolve(moved, phi, 1.0)))
    return reports


def momentum_spread_conservation(
    phi0: StateFunction,
    window: tuple[float, float] = (0.0, 0.5),
    dt: float = 1e-3,
    m: float = 1.0
) -> float:
    """Max change of Δp under free evolution."""
    traj = crank_nicolson_evolve(phi0, window=window, dt=dt, m=m)
    p_op = momentum_op(phi0.grid)
    spreads = np.array([uncertainty(p_op, traj.frame(i)) for i in range(traj.times.size)])
    return float(np.max(np.abs(spreads - spreads[0])))


def phase_parallel_acceleration(h: ObservableOp, phi: State, dt: float = 1e-2) -> float:
    """
    Phase-parallel part of the acceleration of e^{-iĥt}φ at t = 0.

    ψ_tt comes from a five-point difference of the evolved states, not
    from -ĥ²φ, so a non-Hermitian ĥ shows up as a non-zero value.
    """
    frames = np.array([values_of(evolve(h, phi, k * dt)) for k in range(-2, 3)])
    psi_tt = (
        -frames[4] + 16.0 * frames[3] - 30.0 * frames[2] + 16.0 * frames[1] - frames[0]
    ) / (12.0 * dt**2)
    return decompose_vector(phi, like(phi, psi_tt)).phase_parallel

