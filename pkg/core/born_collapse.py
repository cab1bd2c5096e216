"""
Born rule and diffusion collapse for Hilbert Embedding Lab.

On the manifold of Gaussian delta states the Born probability cos²ρ of
the Fubini-Study distance coincides with the normal law. The collapse
model is an isotropic random walk on a truncated projective space
(N oscillator modes) that is absorbed on a set of target states.
"""

import cmath
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import binomtest

from core.exceptions import NonErgodicError, NormalizationError, ShapeError
from core.grid import StateFunction, hermite_function, inner_l2, make_tilde_delta
from core.quantum_geometry import fubini_study_distance
from core.schemas import GridSpec, HitReport, Table, TargetHit, WalkConfig


logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12
NON_ERGODIC_FRACTION = 0.99
RANDOM_CHUNK = 256
DEFAULT_GRID = GridSpec.line(-12.0, 16.0, 2801)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """
    A point of CP^{N-1}: unit amplitudes over N oscillator modes.

    Only |⟨·,·⟩| is meaningful; global phases are ignored.
    """
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=complex).ravel()
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > UNIT_TOL:
            raise NormalizationError(f"projective point has norm {norm:.15g}")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex]) -> "ProjectivePoint":
        vector = np.asarray(amplitudes, dtype=complex).ravel()
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(vector / norm)

    @classmethod
    def on_cp1(cls, probability: float, phase: float = 0.0) -> "ProjectivePoint":
        """(√p, e^{iφ}√(1-p)): overlap² p with the first basis state."""
        second = cmath.exp(1j * phase) * math.sqrt(1.0 - probability)
        return cls.normalized([math.sqrt(probability), second])

    @property
    def n_modes(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "ProjectivePoint") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)))

    def distance(self, other: "ProjectivePoint") -> float:
        return math.acos(min(self.overlap(other), 1.0))

    def transformed(self, unitary: np.ndarray) -> "ProjectivePoint":
        return ProjectivePoint.normalized(np.asarray(unitary) @ self.amplitudes)


StateLike = Union[StateFunction, np.ndarray, ProjectivePoint]


def _as_state(state: StateLike) -> Union[StateFunction, np.ndarray]:
    if isinstance(state, ProjectivePoint):
        return state.amplitudes
    return state


def born_probability(phi: StateLike, psi: StateLike) -> float:
    """cos²ρ(φ, ψ) = |⟨φ, ψ⟩|²."""
    return math.cos(fubini_study_distance(_as_state(phi), _as_state(psi))) ** 2


def born_normal_identity(
    sigma: float,
    a: float,
    b: float,
    grid: GridSpec = DEFAULT_GRID
) -> tuple[float, float, float]:
    """
    e^{-(a-b)²/2σ²} against cos²ρ(δ̃_a, δ̃_b) by quadrature.

    Raises:
        DomainError: If a or b is within 5σ of the grid edge
    """
    lhs = math.exp(-((a - b) ** 2) / (2.0 * sigma**2))
    rhs = abs(inner_l2(make_tilde_delta(a, sigma, grid), make_tilde_delta(b, sigma, grid))) ** 2
    return lhs, rhs, abs(lhs - rhs)


def born_sweep(
    sigma: float = 1.0,
    n_points: int = 21,
    reach: float = 4.0,
    grid: GridSpec = DEFAULT_GRID
) -> Table:
    """The Born/normal identity for |a-b| evenly spaced in [0, reach·σ]."""
    rows = []
    for separation in np.linspace(0.0, reach * sigma, n_points):
        lhs, rhs, gap = born_normal_identity(sigma, 0.0, float(separation), grid)
        rows.append([float(separation), lhs, rhs, gap])
    return Table(name="born_sweep", columns=["separation", "lhs", "rhs", "gap"], rows=rows)


def normal_density_check(
    sigma: float,
    a: Union[float, Sequence[float]],
    b: Union[float, Sequence[float]]
) -> tuple[float, float]:
    """
    |δ̃_a(b)|² against the normal density (1/πσ²)^{d/2} e^{-|a-b|²/σ²}.
    """
    a_vec = np.atleast_1d(np.asarray(a, dtype=float))
    b_vec = np.atleast_1d(np.asarray(b, dtype=float))
    if a_vec.shape != b_vec.shape:
        raise ShapeError("a and b need the same dimension")
    dim = a_vec.size
    distance2 = float(np.sum((a_vec - b_vec) ** 2))
    amplitude = (math.pi * sigma**2) ** (-dim / 4.0) * math.exp(-distance2 / (2.0 * sigma**2))
    reference = (1.0 / (math.pi * sigma**2)) ** (dim / 2.0) * math.exp(-distance2 / sigma**2)
    return amplitude**2, reference


def oscillator_basis(
    grid: GridSpec,
    n_modes: int,
    sigma: float = 1.0,
    center: float = 0.0
) -> np.ndarray:
    """Hermite functions of orders 0..N-1 as rows, shape (N, n)."""
    return np.array([hermite_function(grid, k, center, sigma).values for k in range(n_modes)])


def project_to_modes(state: StateFunction, basis: np.ndarray) -> ProjectivePoint:
    """Coefficients ⟨e_k, ψ⟩ in the truncated basis, renormalized."""
    coefficients = [inner_l2(state, state.with_values(row)) for row in basis]
    return ProjectivePoint.normalized(coefficients)


def manifold_targets(
    centers: Sequence[float],
    sigma: float,
    grid: GridSpec,
    n_modes: int
) -> list[ProjectivePoint]:
    """δ̃_a states expressed in the first N oscillator modes."""
    basis = oscillator_basis(grid, n_modes, sigma)
    return [project_to_modes(make_tilde_delta(a, sigma, grid), basis) for a in centers]


def _horizontal_steps(states: np.ndarray, noise: np.ndarray, step_len: float) -> np.ndarray:
    """Move each row along a random horizontal great circle by step_len."""
    overlap = np.sum(np.conj(states) * noise, axis=1, keepdims=True)
    direction = noise - overlap * states
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    moved = math.cos(step_len) * states + math.sin(step_len) * direction
    return moved / np.linalg.norm(moved, axis=1, keepdims=True)


def _absorbing_target(states: np.ndarray, targets: np.ndarray, threshold: float) -> np.ndarray:
    """Index of the closest target within the absorption radius, else -1."""
    overlaps = np.abs(np.conj(states) @ targets.T)
    closest = np.argmax(overlaps, axis=1)
    inside = overlaps[np.arange(states.shape[0]), closest] >= threshold
    return np.where(inside, closest, -1)


def _run_batch(
    start: np.ndarray,
    targets: np.ndarray,
    cfg: WalkConfig,
    trial_ids: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """
    Walk a batch of trials in lockstep.

    Each trial draws from default_rng([seed, trial]) in chunks, so the
    outcome of a trial does not depend on how trials are batched.

    Returns:
        (hit target index or -1, steps taken) per trial
    """
    size = len(trial_ids)
    n_modes = start.size
    threshold = math.cos(cfg.absorb_tol)
    generators = [np.random.default_rng([cfg.seed, trial]) for trial in trial_ids]
    hits = np.full(size, -1)
    steps = np.zeros(size, dtype=int)
    states = np.tile(start, (size, 1))
    active = np.arange(size)

    first = _absorbing_target(states, targets, threshold)
    hits[:] = first
    active = active[first < 0]
    buffer = np.empty((size, RANDOM_CHUNK, n_modes), dtype=complex)
    for step in range(1, cfg.max_steps + 1):
        if active.size == 0:
            break
        slot = (step - 1) % RANDOM_CHUNK
        if slot == 0:
            for index in active:
                draws = generators[index].standard_normal((RANDOM_CHUNK, 2, n_modes))
                buffer[index] = draws[:, 0, :] + 1j * draws[:, 1, :]
        states[active] = _horizontal_steps(states[active], buffer[active, slot], cfg.step_len)
        landed = _absorbing_target(states[active], targets, threshold)
        done = landed >= 0
        hits[active[done]] = landed[done]
        steps[active[done]] = step
        active = active[~done]
    steps[active] = cfg.max_steps
    return hits, steps


def _batches(n_trials: int, batch_size: int) -> list[list[int]]:
    return [
        list(range(lo, min(lo + batch_size, n_trials)))
        for lo in range(0, n_trials, batch_size)
    ]


def diffuse_walk(
    start: ProjectivePoint,
    targets: Sequence[ProjectivePoint],
    cfg: WalkConfig,
    workers: Optional[int] = None
) -> HitReport:
    """
    Isotropic random walk on projective space absorbed on targets.

    Algorithm:
    1. Every trial starts at `start`; at each step it draws a uniform
       unit direction orthogonal to the phase fibre and moves a
       Fubini-Study distance step_len along it
    2. A trial ends when it is within absorb_tol of a target (the closest
       one wins) or after max_steps
    3. Hit frequencies are conditional on absorption, with Wilson
       intervals

    With workers set, batches run in a process pool; results match the
    serial run exactly.

    Raises:
        NonErgodicError: If more than 99% of the trials are not absorbed
    """
    if not targets:
        raise ShapeError("at least one target is required")
    if any(t.n_modes != start.n_modes for t in targets):
        raise ShapeError("targets and start live in different mode spaces")
    target_matrix = np.array([t.amplitudes for t in targets])
    batches = _batches(cfg.n_trials, cfg.batch_size)

    if workers and workers > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(
                _run_batch,
                [start.amplitudes] * len(batches),
                [target_matrix] * len(batches),
                [cfg] * len(batches),
                batches,
            ))
    else:
        outcomes = [_run_batch(start.amplitudes, target_matrix, cfg, batch) for batch in batches]

    hits = np.concatenate([outcome[0] for outcome in outcomes])
    steps = np.concatenate([outcome[1] for outcome in outcomes])
    absorbed = hits >= 0
    n_absorbed = int(np.sum(absorbed))
    if cfg.n_trials - n_absorbed > NON_ERGODIC_FRACTION * cfg.n_trials:
        raise NonErgodicError(
            f"{cfg.n_trials - n_absorbed} of {cfg.n_trials} trials unabsorbed "
            f"after {cfg.max_steps} steps"
        )

    weights = np.array([start.overlap(t) ** 2 for t in targets])
    born = weights / weights.sum() if weights.sum() > 0 else np.full(len(targets), 1.0 / len(targets))
    report_targets = []
    for index, target in enumerate(targets):
        count = int(np.sum(hits == index))
        interval = binomtest(count, n_absorbed).proportion_ci(
            confidence_level=cfg.confidence, method="wilson"
        )
        report_targets.append(TargetHit(
            fs_distance=start.distance(target),
            hits=count,
            trials=n_absorbed,
            frequency=count / n_absorbed,
            ci_low=float(interval.low),
            ci_high=float(interval.high),
            born_reference=float(born[index]),
        ))
    logger.info("diffuse walk: %d/%d absorbed", n_absorbed, cfg.n_trials)
    return HitReport(
        targets=report_targets,
        n_trials=cfg.n_trials,
        n_absorbed=n_absorbed,
        mean_steps=float(np.mean(steps[absorbed])),
        seed=cfg.seed,
        step_len=cfg.step_len,
        absorb_tol=cfg.absorb_tol,
    )
