"""
Action functionals and dynamics for Hilbert Embedding Lab.

A material point is a path of delta states. Its action can be evaluated
two ways: through the kernel norm of the state velocity (the functional
route) or through the reduced classical Lagrangian of the labels. The
dynamics follow either from integrating the reduced Euler-Lagrange
equations or from minimizing the discretized action directly.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize, root_scalar

from core.exceptions import DomainError, NumericError, OptimizationError, ShapeError
from core.grid import inner_kernel, make_nascent_delta, window_grid
from core.schemas import ActionKind, ActionProblem, GridSpec, KernelKind, KernelSpec


logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-3
DEFAULT_KNOTS = 64

Boundary = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    A time-sampled path, piecewise linear between samples.

    points holds positions x(t) in coordinate time, or (x, t) labels of
    shape (n, 2) when times is a proper-time parameter τ.
    """
    times: np.ndarray
    points: np.ndarray
    velocities: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        points = np.asarray(self.points, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ShapeError("a trajectory needs at least two samples")
        if np.any(np.diff(times) <= 0):
            raise ShapeError("trajectory times must be strictly increasing")
        if points.shape[0] != times.size or points.ndim > 2:
            raise ShapeError("one configuration sample per time is required")
        if points.ndim == 2 and points.shape[1] != 2:
            raise ShapeError("spacetime labels must be (x, t) pairs")
        if not np.all(np.isfinite(points)):
            raise NumericError("trajectory contains non-finite samples")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", points)
        if self.velocities is not None:
            object.__setattr__(self, "velocities", np.asarray(self.velocities, dtype=float))

    @classmethod
    def from_function(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        t0: float,
        t1: float,
        n: int
    ) -> "Trajectory":
        times = np.linspace(t0, t1, n)
        return cls(times=times, points=func(times))

    @property
    def is_spacetime(self) -> bool:
        return self.points.ndim == 2

    def spacetime_labels(self) -> np.ndarray:
        """(x, t) labels; coordinate-time paths use t = times."""
        if self.is_spacetime:
            return self.points
        return np.column_stack([self.points, self.times])

    def position(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """Linear interpolation of x at time t."""
        if self.is_spacetime:
            raise ShapeError("position() needs a coordinate-time trajectory")
        return np.interp(t, self.times, self.points)

    def perturbed(self, bump: np.ndarray) -> "Trajectory":
        return Trajectory(times=self.times, points=self.points + bump)


def _labels(p: ActionProblem, traj: Trajectory) -> np.ndarray:
    if p.kind == ActionKind.CLASSICAL:
        if traj.is_spacetime:
            raise ShapeError("classical actions take coordinate-time positions")
        return traj.points[:, None]
    return traj.spacetime_labels()


def reduced_lagrangian(
    p: ActionProblem,
    velocity: np.ndarray,
    midpoint: np.ndarray
) -> np.ndarray:
    """
    Reduced Lagrangian per segment.

    classical: m/2 ẋ² - V(x); relativistic: m/2 (ṫ² - ẋ²);
    curved: m/2 ((1 + 2u(x)) ṫ² - ẋ²).
    """
    if p.kind == ActionKind.CLASSICAL:
        return 0.5 * p.m * velocity[:, 0] ** 2 - p.potential.value(midpoint[:, 0])
    lapse = 1.0
    if p.kind == ActionKind.CURVED:
        lapse = 1.0 + 2.0 * p.potential.value(midpoint[:, 0])
    return 0.5 * p.m * (lapse * velocity[:, 1] ** 2 - velocity[:, 0] ** 2)


def action_kernel(p: ActionProblem, scale: float = 1.0) -> KernelSpec:
    """Kernel whose delta-path norm reproduces the problem's Lagrangian."""
    if p.kind == ActionKind.CLASSICAL:
        return KernelSpec(kind=KernelKind.EUCLID, scale=scale)
    if p.kind == ActionKind.RELATIVISTIC:
        return KernelSpec(kind=KernelKind.MINKOWSKI, scale=scale)
    return KernelSpec(kind=KernelKind.CURVED, scale=scale, potential=p.potential)


def _kernel_action(
    p: ActionProblem,
    labels: np.ndarray,
    dtau: np.ndarray,
    eps: float,
    kernel: KernelSpec
) -> float:
    total = 0.0
    for index in range(dtau.size):
        start, end = labels[index], labels[index + 1]
        center = 0.5 * (start + end)
        local = window_grid(center, 0.5 * np.abs(end - start) + 6.0 * eps, eps / 3.0)
        dphi = (make_nascent_delta(end, eps, local)
                - make_nascent_delta(start, eps, local)) * (1.0 / dtau[index])
        raw = inner_kernel(dphi, dphi, kernel).real
        if p.kind == ActionKind.CLASSICAL:
            phi = make_nascent_delta(center, eps, local)
            weighted = phi.with_values(phi.values * p.potential.value(local.axis(0)))
            lagrangian = 0.5 * p.m * raw - inner_kernel(weighted, phi, kernel).real
        else:
            lagrangian = -0.5 * p.m * raw
        total += lagrangian * dtau[index]
    return total


def action_functional(
    p: ActionProblem,
    traj: Trajectory,
    via: Literal["kernel", "reduced"] = "reduced",
    eps: float = 0.05,
    richardson: bool = True,
    bounds: Optional[GridSpec] = None
) -> float:
    """
    Evaluate the action of a path.

    The reduced route integrates the reduced Lagrangian with segment
    velocities and midpoint positions. The kernel route replaces every
    label by a unit-mass delta state of width eps and integrates the
    kernel square of the state velocity (negated for Minkowski and
    curved kernels); with richardson=True the widths eps and eps/2 are
    combined to cancel the O(eps²) term.

    Raises:
        DomainError: If bounds are given and a label leaves them (5 eps margin)
    """
    labels = _labels(p, traj)
    dtau = np.diff(traj.times)
    if via == "reduced":
        velocity = np.diff(labels, axis=0) / dtau[:, None]
        midpoint = 0.5 * (labels[1:] + labels[:-1])
        return float(np.sum(reduced_lagrangian(p, velocity, midpoint) * dtau))
    if via != "kernel":
        raise ValueError(f"unknown action route '{via}'")

    if bounds is not None:
        for label in labels:
            if not bounds.contains(label[: bounds.dim], 5.0 * eps):
                raise DomainError(f"trajectory leaves the grid margin at {label.tolist()}")
    kernel = action_kernel(p)
    coarse = _kernel_action(p, labels, dtau, eps, kernel)
    if not richardson:
        return coarse
    fine = _kernel_action(p, labels, dtau, 0.5 * eps, kernel)
    return (4.0 * fine - coarse) / 3.0


def solve_euler_lagrange(
    p: ActionProblem,
    initial: Sequence[float],
    dt: float = DEFAULT_DT,
    window: Optional[tuple[float, float]] = None
) -> Trajectory:
    """
    Integrate the reduced equations of motion with classical RK4.

    Args:
        p: Problem supplying the force field
        initial: (x0, v0) at the start of the window
        dt: Nominal time step; adjusted to divide the window evenly
        window: Overrides p.window

    Returns:
        Coordinate-time trajectory with velocities

    Raises:
        NumericError: If the force becomes non-finite
    """
    t0, t1 = window or p.window
    steps = max(1, int(round((t1 - t0) / dt)))
    h = (t1 - t0) / steps
    times = t0 + h * np.arange(steps + 1)
    xs = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    x, v = float(initial[0]), float(initial[1])
    xs[0], vs[0] = x, v

    def accel(position: float) -> float:
        value = float(p.force(position))
        if not np.isfinite(value):
            raise NumericError(f"non-finite force at x={position}")
        return value

    for step in range(steps):
        k1x, k1v = v, accel(x)
        k2x, k2v = v + 0.5 * h * k1v, accel(x + 0.5 * h * k1x)
        k3x, k3v = v + 0.5 * h * k2v, accel(x + 0.5 * h * k2x)
        k4x, k4v = v + h * k3v, accel(x + h * k3x)
        x += h * (k1x + 2 * k2x + 2 * k3x + k4x) / 6.0
        v += h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
        xs[step + 1], vs[step + 1] = x, v
    return Trajectory(times=times, points=xs, velocities=vs)


def energy(p: ActionProblem, traj: Trajectory) -> np.ndarray:
    """Conserved energy of the reduced dynamics along an RK4 trajectory."""
    if traj.velocities is None:
        raise ShapeError("energy needs a trajectory with velocities")
    if p.kind == ActionKind.CLASSICAL:
        return 0.5 * p.m * traj.velocities**2 + p.potential.value(traj.points)
    if p.kind == ActionKind.CURVED:
        return 0.5 * traj.velocities**2 + p.potential.value(traj.points)
    return 0.5 * traj.velocities**2


def shoot_boundary_value(
    p: ActionProblem,
    boundary: Boundary,
    dt: float = DEFAULT_DT
) -> Trajectory:
    """
    Euler-Lagrange solution through two boundary points, by shooting.

    The initial velocity is found with a secant iteration on the endpoint
    miss distance.
    """
    (t0, x0), (t1, x1) = boundary

    def miss(v0: float) -> float:
        return float(solve_euler_lagrange(p, (x0, v0), dt, (t0, t1)).points[-1] - x1)

    guess = (x1 - x0) / (t1 - t0)
    result = root_scalar(miss, x0=guess, x1=guess + 0.1, method="secant", xtol=1e-13)
    if not result.converged:
        raise NumericError(f"shooting did not converge: {result.flag}")
    return solve_euler_lagrange(p, (x0, result.root), dt, (t0, t1))


def _knot_objective(p: ActionProblem, h: float, x0: float, x1: float):
    """S (classical) or -S (timelike) over interior knots, with its gradient."""

    def potential_term(mid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # objective density is m/2 v² + W(mid), up to constants
        if p.kind == ActionKind.CLASSICAL:
            return -p.potential.value(mid), -p.potential.gradient(mid)
        if p.kind == ActionKind.CURVED:
            return -p.m * p.potential.value(mid), -p.m * p.potential.gradient(mid)
        return np.zeros_like(mid), np.zeros_like(mid)

    offset = 0.0 if p.kind == ActionKind.CLASSICAL else 0.5 * p.m

    def objective(interior: np.ndarray) -> tuple[float, np.ndarray]:
        x = np.concatenate(([x0], interior, [x1]))
        v = np.diff(x) / h
        w, dw = potential_term(0.5 * (x[1:] + x[:-1]))
        value = float(np.sum(0.5 * p.m * v**2 + w - offset) * h)
        grad = p.m * (v[:-1] - v[1:]) + 0.5 * h * (dw[:-1] + dw[1:])
        return value, grad

    return objective


def minimize_action(
    p: ActionProblem,
    boundary: Boundary,
    n_knots: int = DEFAULT_KNOTS,
    max_iter: int = 5000,
    gtol: float = 1e-10
) -> Trajectory:
    """
    Find the stationary path by direct optimization over knots.

    Algorithm:
    1. Place n_knots uniform knots between the boundary times
    2. Start from the straight line through the boundary points
    3. Run BFGS on the reduced action with its analytic gradient
       (timelike problems maximize, so -S is minimized)

    Raises:
        DomainError: If n_knots < 8
        OptimizationError: If the final gradient norm stays above tolerance
    """
    if n_knots < 8:
        raise DomainError("n_knots must be at least 8")
    (t0, x0), (t1, x1) = boundary
    if not t1 > t0:
        raise DomainError("boundary times must increase")
    times = np.linspace(t0, t1, n_knots)
    h = times[1] - times[0]
    objective = _knot_objective(p, h, x0, x1)
    initial = np.interp(times[1:-1], [t0, t1], [x0, x1])

    result = minimize(
        objective,
        initial,
        jac=True,
        method="BFGS",
        options={"gtol": gtol, "maxiter": max_iter},
    )
    _, grad = objective(result.x)
    gradient_norm = float(np.linalg.norm(grad, ord=np.inf))
    if not np.all(np.isfinite(result.x)) or gradient_norm > 1e-6:
        raise OptimizationError(
            f"action minimization stopped after {result.nit} iterations", gradient_norm
        )
    if not result.success:
        logger.warning("BFGS reported '%s'; gradient norm %.3e accepted", result.message, gradient_norm)
    points = np.concatenate(([x0], result.x, [x1]))
    return Trajectory(times=times, points=points)


def first_variation(
    p: ActionProblem,
    traj: Trajectory,
    bump: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]],
    delta: float
) -> float:
    """
    Change of the reduced action under traj + delta·bump.

    The bump must vanish at both endpoints. Stationary paths give a
    change of order delta².
    """
    eta = bump(traj.times) if callable(bump) else np.asarray(bump, dtype=float)
    if abs(eta[0]) > 1e-12 or abs(eta[-1]) > 1e-12:
        raise DomainError("bumps must vanish at the endpoints")
    base = action_functional(p, traj)
    return action_functional(p, traj.perturbed(delta * eta)) - base
