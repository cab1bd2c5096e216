"""
Induced metrics for Hilbert Embedding Lab.

Restricting a kernel product to the manifold of delta states induces a
finite-dimensional metric: ∂²k/∂xᵘ∂yᵛ at coincidence. This module
computes that metric analytically, measures speeds of delta-state paths
in the kernel norm, and tests the sign structure of the Minkowski
(Krein) product.

Minkowski and curved quantities are reported as the negation of the raw
mixed-derivative form, so timelike directions come out positive. The raw
values are always available next to the reported ones.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from core.exceptions import DomainError, NumericError, ShapeError
from core.grid import (
    Point,
    StateFunction,
    as_point,
    evaluate_kernel,
    inner_kernel,
    inner_l2,
    kernel_coefficient,
    make_nascent_delta,
    make_tilde_delta,
    window_grid,
)
from core.schemas import GridSpec, KernelKind, KernelSpec


logger = logging.getLogger(__name__)

# Local windows extend this many widths beyond the path samples.
WINDOW_WIDTHS = 6.0
# Window spacing as a fraction of the delta width.
WINDOW_RESOLUTION = 3.0


@dataclass(frozen=True, eq=False)
class InducedMetric:
    """
    Metric induced by a kernel on the delta-state manifold at a point.

    Attributes:
        point: Label a of the delta state
        g: Raw mixed second derivatives ∂²k/∂xᵘ∂yᵛ at x = y = a
        kind: Kernel family the metric came from
    """
    point: np.ndarray
    g: np.ndarray
    kind: KernelKind

    @property
    def reported(self) -> np.ndarray:
        """g for definite kernels, -g for Minkowski and curved kernels."""
        if self.kind == KernelKind.EUCLID:
            return self.g
        return -self.g

    def square(self, velocity: Point) -> float:
        """Reported square length of a label velocity."""
        v = as_point(velocity, self.g.shape[0])
        return float(v @ self.reported @ v)


@dataclass(frozen=True, eq=False)
class DeltaPath:
    """
    A path a(t) in configuration space realized by delta states.

    Samples must be uniform in t so that velocities can be taken by
    central differences. When bounds are given every sample must lie at
    least 5ε inside them.
    """
    times: np.ndarray
    points: np.ndarray
    eps: float
    bounds: Optional[GridSpec] = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 3:
            raise ShapeError("a delta path needs at least three time samples")
        steps = np.diff(times)
        if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ShapeError("delta path times must be uniform and increasing")
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.shape[0] != times.size:
            raise ShapeError("one point per time sample is required")
        if self.eps <= 0:
            raise DomainError("eps must be positive")
        if self.bounds is not None:
            for point in points:
                if not self.bounds.contains(point, 5.0 * self.eps):
                    raise DomainError(
                        f"delta path leaves the grid margin at {point.tolist()}"
                    )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)

    @classmethod
    def from_function(
        cls,
        label: Callable[[float], Point],
        t0: float,
        t1: float,
        dt: float,
        eps: float,
        bounds: Optional[GridSpec] = None
    ) -> "DeltaPath":
        """Sample label(t) on a uniform time grid."""
        count = int(round((t1 - t0) / dt))
        times = t0 + dt * np.arange(count + 1)
        points = np.array([np.atleast_1d(label(t)) for t in times], dtype=float)
        return cls(times=times, points=points, eps=eps, bounds=bounds)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def index_of(self, t: float) -> int:
        """Index of an interior sample at time t."""
        index = int(np.argmin(np.abs(self.times - t)))
        if not math.isclose(self.times[index], t, rel_tol=0.0, abs_tol=1e-9 * max(1.0, abs(t))):
            raise DomainError(f"t={t} is not a sample of the path")
        if index == 0 or index == self.times.size - 1:
            raise DomainError(f"t={t} is an endpoint; speeds need interior samples")
        return index

    def velocity(self, t: float) -> np.ndarray:
        """Central-difference label velocity da/dt."""
        index = self.index_of(t)
        return (self.points[index + 1] - self.points[index - 1]) / (2.0 * self.dt)


def _require_spacetime(k: KernelSpec, dim: int) -> None:
    if k.kind != KernelKind.EUCLID and dim != 2:
        raise ShapeError(f"{k.kind.value} kernels need (x, t) points")


def induced_metric(k: KernelSpec, a: Point) -> InducedMetric:
    """
    Analytic ∂²k/∂xᵘ∂yᵛ at x = y = a.

    Euclid kernels give L²·I; Minkowski kernels give L²·diag(+1, -1);
    curved kernels give L²·diag(+1, -(1 + 2u(a))). The (L/√2π)^d
    coefficient multiplies all three when the kernel is normalized.
    """
    point = np.atleast_1d(np.asarray(a, dtype=float))
    dim = point.size
    _require_spacetime(k, dim)
    L2 = k.scale**2 * kernel_coefficient(k, dim)
    if k.kind == KernelKind.EUCLID:
        g = L2 * np.eye(dim)
    elif k.kind == KernelKind.MINKOWSKI:
        g = L2 * np.diag([1.0, -1.0])
    else:
        lapse = 1.0 + 2.0 * float(k.potential.value(point[0]))
        g = L2 * np.diag([1.0, -lapse])
    return InducedMetric(point=point, g=g, kind=k.kind)


def finite_difference_metric(k: KernelSpec, a: Point, h: float = 1e-4) -> np.ndarray:
    """Mixed second derivatives of the kernel at (a, a) by central differences."""
    point = np.atleast_1d(np.asarray(a, dtype=float))
    dim = point.size
    _require_spacetime(k, dim)
    g = np.zeros((dim, dim))
    basis = np.eye(dim) * h
    for mu in range(dim):
        for nu in range(dim):
            total = 0.0
            for sx, sy, sign in ((1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)):
                total += sign * float(
                    evaluate_kernel(k, point + sx * basis[mu], point + sy * basis[nu])
                )
            g[mu, nu] = total / (4.0 * h * h)
    return g


def delta_path_square(k: KernelSpec, path: DeltaPath, t: float) -> float:
    """
    Raw kernel square ‖dφ/dt‖² of the delta-state path at t.

    φ_t is the unit-mass regularized delta at a(t); dφ/dt is a central
    difference of neighbouring states, and the square is taken with
    inner_kernel on a local window around a(t).

    Raises:
        DomainError: If t is not an interior sample
    """
    _require_spacetime(k, path.dim)
    index = path.index_of(t)
    center = path.points[index]
    before, after = path.points[index - 1], path.points[index + 1]
    reach = np.maximum(np.abs(before - center), np.abs(after - center))
    local = window_grid(
        center,
        reach + WINDOW_WIDTHS * path.eps,
        path.eps / WINDOW_RESOLUTION,
    )
    dphi = (make_nascent_delta(after, path.eps, local)
            - make_nascent_delta(before, path.eps, local)) * (1.0 / (2.0 * path.dt))
    raw = inner_kernel(dphi, dphi, k).real
    logger.debug("delta path square at t=%g: raw=%.12g", t, raw)
    return raw


def delta_path_speed(k: KernelSpec, path: DeltaPath, t: float) -> float:
    """
    Kernel-norm speed ‖dφ/dt‖ of a delta-state path.

    For Minkowski and curved kernels the reported square is the negated
    raw square and the speed is the square root of its magnitude. The
    result equals the label speed in the induced metric up to O(ε²) and
    O(dt²).
    """
    raw = delta_path_square(k, path, t)
    reported = raw if k.kind == KernelKind.EUCLID else -raw
    return math.sqrt(abs(reported))


def _trimmed_time_axis(f: StateFunction, fraction: float) -> StateFunction:
    grid = f.grid
    cut = max(1, int(round(fraction * grid.n[1])))
    t = grid.axis(1)[cut:-cut]
    trimmed = GridSpec(
        dim=2,
        lo=(grid.lo[0], float(t[0])),
        hi=(grid.hi[0], float(t[-1])),
        n=(grid.n[0], t.size),
    )
    return StateFunction(trimmed, f.values[:, cut:-cut])


def _coarsened(f: StateFunction) -> Optional[StateFunction]:
    grid = f.grid
    if any((n - 1) % 2 for n in grid.n) or any((n - 1) // 2 + 1 < 16 for n in grid.n):
        return None
    coarse = GridSpec(
        dim=2,
        lo=grid.lo,
        hi=grid.hi,
        n=tuple((n - 1) // 2 + 1 for n in grid.n),
    )
    return StateFunction(coarse, f.values[::2, ::2])


def krein_sign(
    f: StateFunction,
    k: Optional[KernelSpec] = None,
    rtol: float = 1e-3
) -> float:
    """
    Krein-space square (f, f)_{H_η} under the Minkowski kernel.

    The value is positive for nonzero even-in-t states of the form
    e^{-t²}φ and negative for odd ones. Convergence is checked by
    recomputing on a coarser grid and on a grid with trimmed time edges.

    Raises:
        NumericError: If the square changes under refinement or truncation
    """
    k = k or KernelSpec(kind=KernelKind.MINKOWSKI)
    if k.kind != KernelKind.MINKOWSKI:
        raise ShapeError("krein_sign uses the Minkowski kernel")
    value = inner_kernel(f, f, k).real
    scale = max(abs(value), float(np.max(np.abs(f.values))) ** 2 * 1e-12)
    variants = [("truncation", _trimmed_time_axis(f, 0.1)), ("refinement", _coarsened(f))]
    for name, variant in variants:
        if variant is None:
            continue
        other = inner_kernel(variant, variant, k).real
        if abs(other - value) > rtol * scale:
            raise NumericError(
                f"Krein square not converged under {name}: {value:.6g} vs {other:.6g}"
            )
    return value


def manifold_vector_ops(
    a: Point,
    b: Point,
    lam: float,
    grid: Optional[GridSpec] = None,
    sigma: float = 0.0
) -> tuple[np.ndarray, np.ndarray]:
    """
    Labels of ω(a) ⊕ ω(b) and λ ⊙ ω(a).

    The manifold of delta states inherits the vector structure of its
    labels: ω(a) ⊕ ω(b) = ω(a + b) and λ ⊙ ω(a) = ω(λa).

    Raises:
        DomainError: If a grid is given and a result falls outside it
            (with a 5σ margin)
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ShapeError("labels must have the same dimension")
    total = a + b
    scaled = lam * a
    if grid is not None:
        for label in (total, scaled):
            if not grid.contains(label, 5.0 * sigma):
                raise DomainError(f"label {label.tolist()} falls outside the grid")
    return total, scaled


def geodesic_length(
    k: KernelSpec,
    start: Point,
    end: Point,
    eps: float,
    n_samples: int = 33
) -> float:
    """
    Length of the straight label path from start to end in the kernel norm.

    Speeds from delta_path_speed are integrated with the trapezoid rule
    over the unit parameter interval.
    """
    start = np.atleast_1d(np.asarray(start, dtype=float))
    end = np.atleast_1d(np.asarray(end, dtype=float))
    dt = 1.0 / (n_samples - 1)
    # one extra sample on each side so every parameter value is interior
    path = DeltaPath.from_function(
        lambda s: start + s * (end - start), -dt, 1.0 + dt, dt, eps
    )
    params = path.times[1:-1]
    speeds = np.array([delta_path_speed(k, path, s) for s in params])
    return float(trapezoid(speeds, params))


def gram_matrix(points: Sequence[Point], sigma: float, grid: GridSpec) -> np.ndarray:
    """L2 Gram matrix of δ̃ states centred at the given labels."""
    states = [make_tilde_delta(point, sigma, grid) for point in points]
    size = len(states)
    gram = np.zeros((size, size), dtype=complex)
    for i in range(size):
        for j in range(i, size):
            gram[i, j] = inner_l2(states[i], states[j])
            gram[j, i] = np.conj(gram[i, j])
    return gram
