"""
Wave packets and their shadows for Hilbert Embedding Lab.

One-dimensional Schrödinger propagation, both in closed form (Gaussian
packet under uniform acceleration) and by Crank-Nicolson, together with
the projections of the evolving state onto the manifold of Gaussian
delta states: shadow velocity and acceleration, Madelung residuals,
width-reset collapse, the constrained-path residual and the free
propagator.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from core.exceptions import (
    DomainError,
    InstabilityError,
    NoRealRootError,
    PolarDecompositionError,
    ShapeError,
    SingularityError,
)
from core.grid import StateFunction, axis_weights, inner_l2, make_tilde_delta, trapezoid_weights
from core.operators import ObservableOp, hamiltonian_op
from core.schemas import GridSpec, PacketParams, Potential, PotentialKind, Table


logger = logging.getLogger(__name__)

DEFAULT_GRID = GridSpec.line(-20.0, 20.0, 2048)
DEFAULT_DT = 5e-4
NORM_DRIFT_LIMIT = 1e-6
POLAR_MASK = 1e-4
SINGULAR_GAP = 0.1

Scheme = Literal["closed_form", "crank_nicolson"]


@dataclass(frozen=True, eq=False)
class WaveTrajectory:
    """
    Frames ψ(x, t_k) of a 1-D evolution.

    scheme records how the frames were produced; analysis routines use
    the spatial stencil that matches it. potential is None when the frames
    came from an explicit ĥ of unknown form.
    """
    grid: GridSpec
    times: np.ndarray
    values: np.ndarray
    m: float = 1.0
    potential: Optional[Potential] = field(default_factory=Potential)
    scheme: Scheme = "closed_form"

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (times.size, self.grid.n[0]):
            raise ShapeError("one frame of grid size per time is required")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def frame(self, index: int) -> StateFunction:
        return StateFunction(self.grid, self.values[index])

    def index_of(self, t: float, reach: int = 0) -> int:
        """Index of the frame at t, requiring `reach` frames on both sides."""
        index = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[index] - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainError(f"no frame stored at t={t}")
        if index < reach or index + reach >= self.times.size:
            raise DomainError(f"t={t} needs {reach} frame(s) on each side")
        local = np.diff(self.times[index - reach: index + reach + 1])
        if reach and not np.allclose(local, self.dt, rtol=1e-9, atol=0.0):
            raise DomainError(f"frames around t={t} are not uniformly spaced")
        return index


@dataclass(frozen=True, eq=False)
class PolarState:
    """Amplitude r ≥ 0 and continuous phase θ with ψ = r e^{iθ}."""
    r: np.ndarray
    theta: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.r * np.exp(1j * self.theta)


# Finite-difference stencils


def _d1(values: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Fourth-order centred first derivative; two edge samples are left at zero."""
    values = np.moveaxis(values, axis, -1)
    out = np.zeros_like(values)
    out[..., 2:-2] = (
        -values[..., 4:] + 8.0 * values[..., 3:-1] - 8.0 * values[..., 1:-3] + values[..., :-4]
    ) / (12.0 * h)
    return np.moveaxis(out, -1, axis)


def _d2(values: np.ndarray, h: float, axis: int = -1, order: int = 4) -> np.ndarray:
    """Centred second derivative (3-point for order 2, 5-point for order 4)."""
    values = np.moveaxis(values, axis, -1)
    out = np.zeros_like(values)
    if order == 2:
        out[..., 1:-1] = (values[..., 2:] - 2.0 * values[..., 1:-1] + values[..., :-2]) / h**2
    else:
        out[..., 2:-2] = (
            -values[..., 4:] + 16.0 * values[..., 3:-1] - 30.0 * values[..., 2:-2]
            + 16.0 * values[..., 1:-3] - values[..., :-4]
        ) / (12.0 * h**2)
    return np.moveaxis(out, -1, axis)


def _five_frames(traj: WaveTrajectory, t: float) -> tuple[int, np.ndarray]:
    index = traj.index_of(t, reach=2)
    return index, traj.values[index - 2: index + 3]


def _time_derivative(frames: np.ndarray, dt: float) -> np.ndarray:
    return (-frames[4] + 8.0 * frames[3] - 8.0 * frames[1] + frames[0]) / (12.0 * dt)


def _second_time_derivative(frames: np.ndarray, dt: float) -> np.ndarray:
    return (
        -frames[4] + 16.0 * frames[3] - 30.0 * frames[2] + 16.0 * frames[1] - frames[0]
    ) / (12.0 * dt**2)


# Closed-form packets


def packet_width(p: PacketParams, t: float) -> float:
    """Width W(t) with |ψ|² ∝ e^{-(x-c)²/W²}: W² = σ² + (t+e)²/(m²σ²)."""
    age = t + p.elapsed
    return math.sqrt(p.sigma**2 + age**2 / (p.m**2 * p.sigma**2))


def _closed_form_values(p: PacketParams, t: float, x: np.ndarray) -> np.ndarray:
    age = t + p.elapsed
    spread = 1.0 + 1j * age / (p.m * p.sigma**2)
    xi = x - 0.5 * p.w * t * t
    free = (
        (math.pi * p.sigma**2) ** (-0.25)
        / np.sqrt(spread)
        * np.exp(
            -((xi - p.x0 - p.v0 * t) ** 2) / (2.0 * p.sigma**2 * spread)
            + 1j * p.m * p.v0 * (xi - p.x0)
            - 0.5j * p.m * p.v0**2 * t
        )
    )
    # boost into the uniformly accelerated frame
    return free * np.exp(1j * (p.m * p.w * t * x - p.m * p.w**2 * t**3 / 6.0))


def packet_closed_form(p: PacketParams, t: float, grid: GridSpec = DEFAULT_GRID) -> StateFunction:
    """
    Gaussian packet under V = -m·w·x at time t.

    The free spreading packet is translated by w t²/2 and multiplied by
    the phase e^{i(m w t x - m w² t³/6)}, which makes it an exact solution
    of the Schrödinger equation with the linear potential.

    Raises:
        DomainError: If the packet is within 5 widths of the grid edge
    """
    if grid.dim != 1:
        raise ShapeError("packets live on 1-D grids")
    center = p.center(t)
    width = packet_width(p, t)
    if not grid.contains(center, 5.0 * width):
        raise DomainError(f"packet at x={center:.4g} (width {width:.3g}) leaves the grid margin")
    return StateFunction(grid, _closed_form_values(p, t, grid.axis(0)))


def linear_potential(p: PacketParams) -> Potential:
    """V = -m·w·x, the potential the closed form solves."""
    return Potential(kind=PotentialKind.LINEAR, strength=-p.m * p.w)


def closed_form_trajectory(
    p: PacketParams,
    times: np.ndarray,
    grid: GridSpec = DEFAULT_GRID
) -> WaveTrajectory:
    values = np.array([packet_closed_form(p, t, grid).values for t in times])
    return WaveTrajectory(
        grid=grid, times=np.asarray(times, dtype=float), values=values,
        m=p.m, potential=linear_potential(p), scheme="closed_form",
    )


def frames_around(t: float, dt: float, reach: int = 2) -> np.ndarray:
    """Uniform times t + k·dt for |k| ≤ reach."""
    return t + dt * np.arange(-reach, reach + 1)


# Numerical propagation


def crank_nicolson_evolve(
    psi0: StateFunction,
    potential: Optional[Potential] = None,
    window: tuple[float, float] = (0.0, 0.5),
    dt: float = DEFAULT_DT,
    m: float = 1.0,
    store_every: int = 1,
    hamiltonian: Optional[ObservableOp] = None
) -> WaveTrajectory:
    """
    Crank-Nicolson propagation of iψ_t = ĥψ with Dirichlet edges.

    Algorithm:
    1. Build ĥ = -(1/2m)D₂ + V with the 3-point Laplacian
    2. Factor A = I + i dt/2 ĥ once (sparse LU)
    3. Step ψ ← A⁻¹ (I - i dt/2 ĥ) ψ, checking the norm after every step

    An explicit grid `hamiltonian` replaces step 1; the trajectory then
    records `potential` only if one is passed along with it. The frame at
    the window end is always kept, even off the store_every cadence.

    Raises:
        InstabilityError: If the squared norm drifts by more than 1e-6 in one step
    """
    grid = psi0.grid
    h = grid.spacing[0]
    if dt > m * h * h:
        logger.warning("dt=%g exceeds h²m=%g; accuracy margin reduced", dt, m * h * h)
    t0, t1 = window
    steps = max(1, int(round((t1 - t0) / dt)))
    dt = (t1 - t0) / steps
    recorded = potential
    if hamiltonian is None:
        recorded = potential or Potential()
        hamiltonian = hamiltonian_op(grid, m, potential)
    ham = hamiltonian.matrix
    identity = sparse.identity(grid.n[0], dtype=complex, format="csc")
    forward = (identity - 0.5j * dt * ham).tocsr()
    solver = splu((identity + 0.5j * dt * ham).tocsc())

    psi = psi0.values.astype(complex).copy()
    norm2 = psi0.norm() ** 2
    frames = [psi.copy()]
    times = [t0]
    weights = axis_weights(grid, 0)
    for step in range(1, steps + 1):
        psi = solver.solve(forward @ psi)
        new_norm2 = float(np.sum(weights * np.abs(psi) ** 2))
        if abs(new_norm2 - norm2) > NORM_DRIFT_LIMIT or not np.isfinite(new_norm2):
            raise InstabilityError(
                f"norm drift {abs(new_norm2 - norm2):.3e} at step {step}"
            )
        norm2 = new_norm2
        if step % store_every == 0:
            frames.append(psi.copy())
            times.append(t0 + step * dt)
    if steps % store_every:
        frames.append(psi.copy())
        times.append(t1)
    return WaveTrajectory(
        grid=grid, times=np.array(times), values=np.array(frames),
        m=m, potential=recorded, scheme="crank_nicolson",
    )


def expected_position(psi: StateFunction) -> float:
    x = psi.grid.axis(0)
    return float(np.sum(trapezoid_weights(psi.grid) * x * np.abs(psi.values) ** 2))


def measured_width(psi: StateFunction) -> float:
    """W = sqrt(2 Var x), matching packet_width for Gaussians."""
    weights = trapezoid_weights(psi.grid)
    density = np.abs(psi.values) ** 2
    x = psi.grid.axis(0)
    mean = float(np.sum(weights * x * density))
    return math.sqrt(2.0 * float(np.sum(weights * (x - mean) ** 2 * density)))


# Shadow projections


def polar_decompose(psi: StateFunction, floor: float = 1e-8) -> PolarState:
    """
    Split ψ into amplitude and a phase unwrapped along x.

    Raises:
        PolarDecompositionError: If r vanishes at an interior point of the
            effective support (where r exceeds floor·max r on both sides)
    """
    r = np.abs(psi.values)
    peak = float(np.max(r))
    if peak == 0.0:
        raise PolarDecompositionError("state vanishes identically")
    support = np.flatnonzero(r > POLAR_MASK * peak)
    inner = r[support[0]: support[-1] + 1]
    if np.any(inner <= floor * peak):
        raise PolarDecompositionError("amplitude vanishes inside the support")
    theta = np.unwrap(np.angle(psi.values))
    return PolarState(r=r, theta=theta)


def _shadow_pairing(
    traj: WaveTrajectory,
    derivative: np.ndarray,
    r: np.ndarray
) -> tuple[float, float]:
    h = traj.grid.spacing[0]
    weights = axis_weights(traj.grid, 0)
    r_x = _d1(r, h)
    norm2 = float(np.sum(weights * r_x * r_x))
    if norm2 == 0.0:
        raise PolarDecompositionError("dr/dx vanishes")
    pairing = float(np.sum(weights * derivative * r_x))
    return pairing / norm2, -pairing / norm2


def shadow_velocity(traj: WaveTrajectory, t: float, literal: bool = False) -> float:
    """
    Velocity of the state's projection onto the delta-state manifold.

    Returns (dr/dt, dr/dx)/‖dr/dx‖², which is -v(t) for accelerated
    Gaussian packets; literal=True pairs with -dr/dx instead and returns +v.
    """
    _, frames = _five_frames(traj, t)
    amplitudes = np.abs(frames)
    polar_decompose(traj.frame(traj.index_of(t)))
    r_t = _time_derivative(amplitudes, traj.dt)
    value, literal_value = _shadow_pairing(traj, r_t, amplitudes[2])
    return literal_value if literal else value


def shadow_acceleration(traj: WaveTrajectory, t: float, literal: bool = False) -> float:
    """(d²r/dt², dr/dx)/‖dr/dx‖²; equals -w at t=0 for fresh packets."""
    _, frames = _five_frames(traj, t)
    amplitudes = np.abs(frames)
    polar_decompose(traj.frame(traj.index_of(t)))
    r_tt = _second_time_derivative(amplitudes, traj.dt)
    value, literal_value = _shadow_pairing(traj, r_tt, amplitudes[2])
    return literal_value if literal else value


def generator_shadow_velocity(
    psi: StateFunction,
    h: ObservableOp,
    orthogonal: bool = False
) -> float:
    """
    Shadow velocity from dψ/dt = -iĥψ at a single instant.

    Re⟨e^{iθ} dr/dx, dψ/dt⟩/‖dr/dx‖² equals the frame-based reading. With
    orthogonal=True the velocity is replaced by -i(ĥ - Ē)ψ, which leaves
    the value unchanged.
    """
    velocity = -1j * h.apply(psi).values
    if orthogonal:
        mean = inner_l2(h.apply(psi), psi)
        velocity = velocity + 1j * mean * psi.values
    r = np.abs(psi.values)
    r_x = _d1(r, psi.grid.spacing[0])
    phase = np.exp(1j * polar_decompose(psi).theta)
    weights = axis_weights(psi.grid, 0)
    pairing = float(np.sum(weights * np.real(np.conj(r_x * phase) * velocity)))
    return pairing / float(np.sum(weights * r_x * r_x))


def collapse_width_reset(p: PacketParams, t1: float) -> PacketParams:
    """
    Packet after a collapse at t1 that restores the current width.

    σ̃ solves σ̃² + t1²/(m²σ̃²) = σ², taking the root that tends to σ as
    t1 → 0; centre and velocity advance to their values at t1.

    Raises:
        NoRealRootError: If t1 > mσ²/2
    """
    if t1 < 0:
        raise DomainError("collapse interval must be non-negative")
    sigma2 = packet_width(p, 0.0) ** 2
    discriminant = sigma2**2 - 4.0 * t1**2 / p.m**2
    if discriminant < 0:
        raise NoRealRootError(
            f"no width reset for t1={t1} (limit {p.m * sigma2 / 2.0:.4g})"
        )
    tilde2 = 0.5 * (sigma2 + math.sqrt(discriminant))
    return PacketParams(
        sigma=math.sqrt(tilde2),
        m=p.m,
        x0=p.center(t1),
        v0=p.velocity(t1),
        w=p.w,
        elapsed=t1,
    )


def madelung_residuals(traj: WaveTrajectory, t: float) -> tuple[float, float]:
    """
    Max-norm residuals of the continuity and Hamilton-Jacobi equations.

    With S = ψ̄(iψ_t + (1/2m)ψ_xx - Vψ), the continuity residual
    ∂t r² + ∂x(r²θ_x)/m is 2 Im S and the Hamilton-Jacobi residual
    θ_t + θ_x²/2m + V - r_xx/(2m r) is -Re S / r². Points with
    r ≤ 1e-4 max r are masked. The Laplacian stencil follows the scheme
    that produced the frames.

    Raises:
        DomainError: If the trajectory does not record its potential
    """
    if traj.potential is None:
        raise DomainError("trajectory from an explicit ĥ has no known potential")
    _, frames = _five_frames(traj, t)
    psi = frames[2]
    h = traj.grid.spacing[0]
    order = 2 if traj.scheme == "crank_nicolson" else 4
    psi_t = _time_derivative(frames, traj.dt)
    psi_xx = _d2(psi, h, order=order)
    potential = traj.potential.value(traj.grid.axis(0))
    residual = np.conj(psi) * (1j * psi_t + psi_xx / (2.0 * traj.m) - potential * psi)
    r2 = np.abs(psi) ** 2
    mask = r2 > (POLAR_MASK**2) * float(np.max(r2))
    mask[:2] = mask[-2:] = False
    if not np.any(mask):
        raise PolarDecompositionError("no samples above the amplitude mask")
    cont = float(np.max(np.abs(2.0 * residual.imag[mask])))
    hj = float(np.max(np.abs(residual.real[mask] / r2[mask])))
    logger.debug("madelung residuals at t=%g: continuity %.3e, HJ %.3e", t, cont, hj)
    return cont, hj


def stationary_trajectory(
    psi: StateFunction,
    energy: float,
    times: np.ndarray,
    m: float = 1.0,
    potential: Optional[Potential] = None
) -> WaveTrajectory:
    """Frames ψ e^{-iEt} of a stationary state."""
    values = psi.values[None, :] * np.exp(-1j * energy * np.asarray(times))[:, None]
    return WaveTrajectory(
        grid=psi.grid, times=times, values=values,
        m=m, potential=potential or Potential(), scheme="closed_form",
    )


def theorem1_residual(
    psi: StateFunction,
    tau: float,
    eps: float,
    m: float = 1.0,
    potential: Optional[Potential] = None
) -> float:
    """
    Residual of the constrained path φ_τ(x, t) = ψ(x, t) δ̃(t - τ).

    Returns ‖dφ_τ/dτ - (-∂t - iĥ)φ_τ‖ over the (x, t) grid. It reaches
    the discretization floor when ψ solves the Schrödinger equation and
    stays O(1) otherwise. ∂τ acts on δ̃ analytically; ψ_t and ĥψ use
    fourth-order differences.

    Raises:
        DomainError: If τ is within 5 eps of the time edges
    """
    grid = psi.grid
    if grid.dim != 2:
        raise ShapeError("theorem1_residual needs samples on an (x, t) grid")
    t_lo, t_hi = grid.lo[1], grid.hi[1]
    if not (t_lo + 5.0 * eps <= tau <= t_hi - 5.0 * eps):
        raise DomainError(f"tau={tau} needs a 5 eps margin in t")
    hx, ht = grid.spacing
    x, t = grid.axis(0), grid.axis(1)
    values = psi.values
    delta = (math.pi * eps**2) ** (-0.25) * np.exp(-((t - tau) ** 2) / (2.0 * eps**2))
    delta_t = -(t - tau) / eps**2 * delta
    potential = potential or Potential()
    h_psi = -_d2(values, hx, axis=0) / (2.0 * m) + potential.value(x)[:, None] * values
    psi_t = _d1(values, ht, axis=1)

    phi_tau = -values * delta_t[None, :]
    generator = -(psi_t * delta[None, :] + values * delta_t[None, :]) - 1j * h_psi * delta[None, :]
    difference = phi_tau - generator
    # stencil edges carry no derivative information
    difference[:2, :] = difference[-2:, :] = 0.0
    difference[:, :2] = difference[:, -2:] = 0.0
    weights = trapezoid_weights(grid)
    return math.sqrt(float(np.sum(weights * np.abs(difference) ** 2)))


def spacetime_samples(
    p: PacketParams,
    x_axis: tuple[float, float, int],
    t_axis: tuple[float, float, int]
) -> StateFunction:
    """Closed-form packet sampled on an (x, t) grid."""
    grid = GridSpec.plane(x_axis, t_axis)
    x = grid.axis(0)
    columns = [_closed_form_values(p, t, x) for t in grid.axis(1)]
    return StateFunction(grid, np.stack(columns, axis=1))


def free_propagator(m: float, x: float, t: float, y: float, s: float) -> complex:
    """g(x,t;y,s) = (m/2πi(t-s))^{1/2} e^{i m (x-y)²/2(t-s)}."""
    gap = t - s
    if abs(gap) < SINGULAR_GAP:
        raise SingularityError(f"|t - s| = {abs(gap):.3g} is below {SINGULAR_GAP}")
    return cmath.sqrt(m / (2j * math.pi * gap)) * cmath.exp(1j * m * (x - y) ** 2 / (2.0 * gap))


def propagator_residual(
    m: float,
    x: float,
    t: float,
    y: float,
    s: float,
    step: float = 1e-3
) -> complex:
    """
    (-∂t - iĥ_x) g at (x, t; y, s) by fourth-order differences.

    Raises:
        SingularityError: If |t - s| < 0.1 (including the stencil reach)
    """
    if abs(t - s) - 2.0 * step < SINGULAR_GAP:
        raise SingularityError(f"|t - s| = {abs(t - s):.3g} is too close to coincidence")
    offsets = step * np.arange(-2, 3)
    in_t = np.array([free_propagator(m, x, t + d, y, s) for d in offsets])
    in_x = np.array([free_propagator(m, x + d, t, y, s) for d in offsets])
    g_t = _time_derivative(in_t, step)
    g_xx = _second_time_derivative(in_x, step)
    return complex(-g_t + 0.5j * g_xx / m)


def propagate_with_kernel(f: StateFunction, m: float, t: float, s: float) -> StateFunction:
    """(G f)(x) = ∫ g(x,t;y,s) f(y) dy by trapezoid quadrature."""
    gap = t - s
    if abs(gap) < SINGULAR_GAP:
        raise SingularityError(f"|t - s| = {abs(gap):.3g} is below {SINGULAR_GAP}")
    x = f.grid.axis(0)
    diff2 = np.subtract.outer(x, x) ** 2
    kernel = np.sqrt(m / (2j * math.pi * gap)) * np.exp(1j * m * diff2 / (2.0 * gap))
    return f.with_values(kernel @ (axis_weights(f.grid, 0) * f.values))


def propagator_group_gap(
    f: StateFunction,
    m: float,
    t: float,
    u: float,
    s: float,
    interior: float = 0.5
) -> float:
    """
    Sup-norm gap between G(t,u)G(u,s)f and G(t,s)f.

    The gap is measured on the central `interior` fraction of the grid.
    """
    two_step = propagate_with_kernel(propagate_with_kernel(f, m, u, s), m, t, u)
    one_step = propagate_with_kernel(f, m, t, s)
    x = f.grid.axis(0)
    half = 0.5 * interior * (f.grid.hi[0] - f.grid.lo[0])
    middle = np.abs(x - 0.5 * (f.grid.hi[0] + f.grid.lo[0])) <= half
    return float(np.max(np.abs(two_step.values[middle] - one_step.values[middle])))


def momentum_projection_split(traj: WaveTrajectory, t: float) -> tuple[float, float]:
    """
    Re(dφ/dt, -ip̂φ) and (dr/dt, -dr/dx) - (r dθ/dt, r dθ/dx).

    The two agree; the second form separates the shadow part from the
    phase part.
    """
    _, frames = _five_frames(traj, t)
    psi = frames[2]
    h = traj.grid.spacing[0]
    weights = axis_weights(traj.grid, 0)
    psi_t = _time_derivative(frames, traj.dt)
    psi_x = _d1(psi, h)
    lhs = float(np.sum(weights * np.real(np.conj(psi_t) * -psi_x)))

    r = np.abs(psi)
    safe = np.where(r > 0.0, r, 1.0)
    r_t = np.where(r > 0.0, np.real(np.conj(psi) * psi_t) / safe, 0.0)
    r_x = np.where(r > 0.0, np.real(np.conj(psi) * psi_x) / safe, 0.0)
    r_theta_t = np.where(r > 0.0, np.imag(np.conj(psi) * psi_t) / safe, 0.0)
    r_theta_x = np.where(r > 0.0, np.imag(np.conj(psi) * psi_x) / safe, 0.0)
    rhs = float(np.sum(weights * (r_t * -r_x))) - float(np.sum(weights * r_theta_t * r_theta_x))
    return lhs, rhs


def collapse_orthogonality(sigma: float, a: float, grid: GridSpec, step: float = 1e-5) -> float:
    """inner_l2(dr/dσ, dr/dx) for the δ̃ state at a, by central differences."""
    wider = make_tilde_delta(a, sigma + step, grid).values.real
    narrower = make_tilde_delta(a, sigma - step, grid).values.real
    r_sigma = (wider - narrower) / (2.0 * step)
    r_x = _d1(make_tilde_delta(a, sigma, grid).values.real, grid.spacing[0])
    return float(np.sum(axis_weights(grid, 0) * r_sigma * r_x))


def frame_table(traj: WaveTrajectory, stride: int = 1, name: str = "frames") -> Table:
    """Frames as rows (t, x, Re ψ, Im ψ, r, θ)."""
    x = traj.grid.axis(0)
    rows: list[list[float]] = []
    for index in range(0, traj.times.size, stride):
        psi = traj.values[index]
        theta = np.unwrap(np.angle(psi))
        for j in range(x.size):
            rows.append([
                float(traj.times[index]), float(x[j]), float(psi[j].real),
                float(psi[j].imag), float(abs(psi[j])), float(theta[j]),
            ])
    return Table(name=name, columns=["t", "x", "re_psi", "im_psi", "r", "theta"], rows=rows)
