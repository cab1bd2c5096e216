"""
Grid substrate for Hilbert Embedding Lab.

Uniform grids with trapezoid quadrature, complex state samples, and the
two inner products every other module is built on: the plain L2 product
and the kernel-weighted double integral.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence, Union

import numpy as np
from numpy.polynomial import hermite

from core.exceptions import DomainError, NormalizationError, NumericError, ShapeError
from core.schemas import GridSpec, KernelKind, KernelSpec


logger = logging.getLogger(__name__)

Point = Union[float, Sequence[float], np.ndarray]

# Curved kernels are not separable; the dense double sum is capped.
MAX_CURVED_POINTS = 16384


@dataclass(frozen=True, eq=False)
class StateFunction:
    """
    Complex-valued samples of a state on a grid.

    values always has the grid's shape and is read-only once constructed.
    """
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=complex)
        expected = int(np.prod(self.grid.shape))
        if values.size != expected:
            raise ShapeError(
                f"state has {values.size} samples, grid expects {expected}"
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise NumericError("state values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: GridSpec, func: Callable[..., Any]) -> "StateFunction":
        """Sample func(x) or func(x, t) on the grid mesh."""
        return cls(grid, func(*grid.mesh()))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "StateFunction":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def with_values(self, values: Any) -> "StateFunction":
        return StateFunction(self.grid, values)

    def norm(self) -> float:
        return math.sqrt(max(inner_l2(self, self).real, 0.0))

    def normalized(self) -> "StateFunction":
        norm = self.norm()
        if norm == 0.0:
            raise NormalizationError("cannot normalize the zero state")
        return self.with_values(self.values / norm)

    def conj(self) -> "StateFunction":
        return self.with_values(np.conj(self.values))

    def __add__(self, other: "StateFunction") -> "StateFunction":
        _require_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "StateFunction") -> "StateFunction":
        _require_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: complex) -> "StateFunction":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "StateFunction":
        return self.with_values(-self.values)


def _require_same_grid(f: StateFunction, g: StateFunction) -> None:
    if f.grid != g.grid:
        raise ShapeError("states live on different grids")


def as_point(a: Point, dim: int) -> np.ndarray:
    """Coerce a scalar or sequence label into a point of the given dimension."""
    point = np.atleast_1d(np.asarray(a, dtype=float))
    if point.shape != (dim,):
        raise ShapeError(f"point {a!r} does not have {dim} coordinate(s)")
    return point


def axis_weights(grid: GridSpec, index: int) -> np.ndarray:
    """Trapezoid weights along one axis."""
    h = grid.spacing[index]
    weights = np.full(grid.n[index], h)
    weights[0] = weights[-1] = 0.5 * h
    return weights


def trapezoid_weights(grid: GridSpec) -> np.ndarray:
    """Trapezoid weights on the full grid (outer product of axis weights)."""
    weights = axis_weights(grid, 0)
    for index in range(1, grid.dim):
        weights = np.multiply.outer(weights, axis_weights(grid, index))
    return weights


def inner_l2(f: StateFunction, g: StateFunction) -> complex:
    """
    Trapezoid approximation of ∫ f ḡ.

    Raises:
        ShapeError: If f and g live on different grids
    """
    _require_same_grid(f, g)
    # np.sum reduces contiguous arrays pairwise
    integrand = trapezoid_weights(f.grid) * f.values * np.conj(g.values)
    return complex(np.sum(integrand.ravel()))


def kernel_axis_matrix(
    coords: np.ndarray,
    other: np.ndarray,
    scale: float,
    sign: float = -1.0
) -> np.ndarray:
    """Matrix e^{sign·L²(x-y)²/2} between two coordinate vectors."""
    diff = np.subtract.outer(coords, other)
    return np.exp(sign * 0.5 * scale**2 * diff**2)


def kernel_coefficient(k: KernelSpec, dim: int) -> float:
    if not k.normalized:
        return 1.0
    return (k.scale / math.sqrt(2.0 * math.pi)) ** dim


def evaluate_kernel(k: KernelSpec, x: Any, y: Any) -> np.ndarray:
    """
    Pointwise kernel values k(x, y).

    x and y are arrays whose last axis holds the coordinates; 1-D kernels
    also accept plain scalars. Minkowski and curved kernels read the last
    axis as (x, t).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    L2 = k.scale**2
    if k.kind == KernelKind.EUCLID:
        if x.ndim == 0 or y.ndim == 0:
            sq = (x - y) ** 2
            dim = 1
        else:
            sq = np.sum((x - y) ** 2, axis=-1)
            dim = x.shape[-1]
        return kernel_coefficient(k, dim) * np.exp(-0.5 * L2 * sq)
    if x.shape[-1:] != (2,) or y.shape[-1:] != (2,):
        raise ShapeError(f"{k.kind.value} kernels act on (x, t) points")
    dx = x[..., 0] - y[..., 0]
    dt = x[..., 1] - y[..., 1]
    lapse = 1.0
    if k.kind == KernelKind.CURVED:
        lapse = 1.0 + k.potential.value(x[..., 0]) + k.potential.value(y[..., 0])
    return kernel_coefficient(k, 2) * np.exp(-0.5 * L2 * dx**2 + 0.5 * L2 * lapse * dt**2)


def _checked(matrix: np.ndarray, kind: KernelKind) -> np.ndarray:
    if not np.all(np.isfinite(matrix)):
        raise NumericError(f"{kind.value} kernel overflowed on this grid")
    return matrix


def inner_kernel(f: StateFunction, g: StateFunction, k: KernelSpec) -> complex:
    """
    Double quadrature of ∫∫ k(x, y) f(x) ḡ(y) dx dy.

    Euclid and Minkowski kernels factor over axes, so the double sum is
    evaluated as a sandwich of axis matrices. Curved kernels couple the
    axes through u(x) + u(y) and are summed row by row.

    Raises:
        ShapeError: On grid mismatch, or a spacetime kernel on a 1-D grid
        NumericError: If kernel values are not finite
    """
    _require_same_grid(f, g)
    grid = f.grid
    weights = trapezoid_weights(grid)
    a = weights * f.values
    b = weights * np.conj(g.values)
    coefficient = kernel_coefficient(k, grid.dim)
    axes = grid.axes()

    if k.kind == KernelKind.EUCLID:
        if grid.dim == 1:
            kx = _checked(kernel_axis_matrix(axes[0], axes[0], k.scale), k.kind)
            value = a @ (kx @ b)
        else:
            kx = _checked(kernel_axis_matrix(axes[0], axes[0], k.scale), k.kind)
            kt = _checked(kernel_axis_matrix(axes[1], axes[1], k.scale), k.kind)
            value = np.sum(a * (kx @ b @ kt))
        return complex(coefficient * value)

    if grid.dim != 2:
        raise ShapeError(f"{k.kind.value} kernels require a 1+1-D grid")

    kx = _checked(kernel_axis_matrix(axes[0], axes[0], k.scale), k.kind)
    if k.kind == KernelKind.MINKOWSKI:
        kt = _checked(kernel_axis_matrix(axes[1], axes[1], k.scale, sign=1.0), k.kind)
        value = np.sum(a * (kx @ b @ kt))
        return _finite(complex(coefficient * value), k.kind)

    n_points = grid.n[0] * grid.n[1]
    if n_points > MAX_CURVED_POINTS:
        raise DomainError(
            f"curved kernel quadrature limited to {MAX_CURVED_POINTS} points, got {n_points}"
        )
    u = k.potential.value(axes[0])
    dt2 = np.subtract.outer(axes[1], axes[1]) ** 2
    value = 0.0 + 0.0j
    for i in range(grid.n[0]):
        lapse = 0.5 * k.scale**2 * (1.0 + u[i] + u)
        temporal = _checked(np.exp(lapse[:, None, None] * dt2[None, :, :]), k.kind)
        # Σ_j kx[i,j] Σ_kl a[i,k] T[j,k,l] b[j,l]
        value += np.einsum("j,k,jkl,jl->", kx[i], a[i], temporal, b)
    return _finite(complex(coefficient * value), k.kind)


def _finite(value: complex, kind: KernelKind) -> complex:
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NumericError(f"{kind.value} kernel product is not finite")
    return value


def _require_margin(grid: GridSpec, point: np.ndarray, margin: float, what: str) -> None:
    if not grid.contains(point, margin):
        raise DomainError(
            f"{what} at {point.tolist()} needs a margin of {margin:g} inside the grid"
        )


def _squared_distance(grid: GridSpec, point: np.ndarray) -> np.ndarray:
    mesh = grid.mesh()
    return sum((mesh[axis] - point[axis]) ** 2 for axis in range(grid.dim))


def make_tilde_delta(a: Point, sigma: float, grid: GridSpec) -> StateFunction:
    """
    Unit-L2 Gaussian approximating the delta state at a.

    Values are (πσ²)^{-d/4} e^{-|x-a|²/2σ²}.

    Raises:
        DomainError: If a is within 5σ of the grid boundary
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    point = as_point(a, grid.dim)
    _require_margin(grid, point, 5.0 * sigma, "delta state")
    amplitude = (math.pi * sigma**2) ** (-grid.dim / 4.0)
    return StateFunction(
        grid, amplitude * np.exp(-_squared_distance(grid, point) / (2.0 * sigma**2))
    )


def make_nascent_delta(a: Point, eps: float, grid: GridSpec) -> StateFunction:
    """
    Unit-mass Gaussian (2πε²)^{-d/2} e^{-|x-a|²/2ε²}.

    This is the regularization of δ_a for kernel norms, whose limit is
    k(a, a) rather than 1/ε.

    Raises:
        DomainError: If a is within 5ε of the grid boundary
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    point = as_point(a, grid.dim)
    _require_margin(grid, point, 5.0 * eps, "nascent delta")
    amplitude = (2.0 * math.pi * eps**2) ** (-grid.dim / 2.0)
    return StateFunction(
        grid, amplitude * np.exp(-_squared_distance(grid, point) / (2.0 * eps**2))
    )


def window_grid(center: Point, half_width: Point, spacing: Point) -> GridSpec:
    """
    A local grid centred on a point.

    Localized states are integrated on small windows, which keeps dense
    kernel matrices small.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    dim = center.size
    half = np.broadcast_to(np.asarray(half_width, dtype=float), (dim,))
    step = np.broadcast_to(np.asarray(spacing, dtype=float), (dim,))
    n = [max(16, int(math.ceil(2.0 * half[axis] / step[axis])) + 1) for axis in range(dim)]
    return GridSpec(
        dim=dim,
        lo=tuple(float(center[axis] - half[axis]) for axis in range(dim)),
        hi=tuple(float(center[axis] + half[axis]) for axis in range(dim)),
        n=tuple(n),
    )


def hermite_function(
    grid: GridSpec,
    order: int,
    center: float = 0.0,
    sigma: float = 1.0
) -> StateFunction:
    """
    Normalized Hermite function of the given order on a 1-D grid.

    order 0 coincides with make_tilde_delta(center, sigma).
    """
    if grid.dim != 1:
        raise ShapeError("hermite functions are one-dimensional")
    xi = (grid.axis(0) - center) / sigma
    coefficients = np.zeros(order + 1)
    coefficients[order] = 1.0
    norm = math.sqrt(2.0**order * math.factorial(order) * math.sqrt(math.pi) * sigma)
    values = hermite.hermval(xi, coefficients) * np.exp(-0.5 * xi**2) / norm
    return StateFunction(grid, values)


def gaussian_packet(
    grid: GridSpec,
    center: float = 0.0,
    sigma: float = 1.0,
    momentum: float = 0.0
) -> StateFunction:
    """Unit-L2 Gaussian e^{ipx} δ̃ on a 1-D grid, without a margin check."""
    x = grid.axis(0)
    amplitude = (math.pi * sigma**2) ** (-0.25)
    values = amplitude * np.exp(-((x - center) ** 2) / (2.0 * sigma**2) + 1j * momentum * x)
    return StateFunction(grid, values)
