"""
Observables for Hilbert Embedding Lab.

Observables act either on grid states (sparse finite-difference stencils
with Dirichlet edges) or on finite-dimensional state vectors (dense
matrices). Both kinds share one wrapper so the geometry routines do not
care which space they run in.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Union

import numpy as np
from scipy import sparse

from core.exceptions import ShapeError
from core.grid import StateFunction, inner_l2
from core.schemas import GridSpec, Potential


State = Union[StateFunction, np.ndarray]


class ObservableKind(str, Enum):
    """
    Origin of an observable.

    - POSITION: multiplication by x
    - MOMENTUM: -i d/dx (centered difference)
    - HAMILTONIAN: -(1/2m) d²/dx² + V(x) (3-point Laplacian)
    - CUSTOM: any matrix, including products and commutators
    """
    POSITION = "position"
    MOMENTUM = "momentum"
    HAMILTONIAN = "hamiltonian"
    CUSTOM = "custom"


def values_of(state: State) -> np.ndarray:
    if isinstance(state, StateFunction):
        return state.values.ravel()
    return np.asarray(state, dtype=complex).ravel()


def like(state: State, values: np.ndarray) -> State:
    """Wrap raw values in the same representation as state."""
    if isinstance(state, StateFunction):
        return state.with_values(values)
    return np.asarray(values, dtype=complex)


def braket(phi: State, psi: State) -> complex:
    """⟨φ|ψ⟩, antilinear in φ."""
    if isinstance(phi, StateFunction):
        return inner_l2(psi, phi)
    return complex(np.vdot(values_of(phi), values_of(psi)))


def norm(state: State) -> float:
    return float(np.sqrt(max(braket(state, state).real, 0.0)))


@dataclass(frozen=True, eq=False)
class ObservableOp:
    """
    A Hermitian observable.

    Attributes:
        kind: How the operator was built
        matrix: scipy.sparse matrix (grid) or dense ndarray (finite)
        grid: Grid the stencil lives on, None for finite-dimensional ops
        name: Label used in reports
    """
    kind: ObservableKind
    matrix: Any
    grid: Optional[GridSpec] = None
    name: str = ""

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def apply(self, state: State) -> State:
        vector = values_of(state)
        if vector.size != self.size:
            raise ShapeError(f"{self.name or self.kind.value} acts on {self.size} amplitudes")
        return like(state, self.matrix @ vector)

    def expectation(self, state: State) -> complex:
        return braket(state, self.apply(state))

    def _combine(self, other: "ObservableOp", matrix: Any, name: str) -> "ObservableOp":
        if other.size != self.size:
            raise ShapeError("observables act on different spaces")
        return ObservableOp(ObservableKind.CUSTOM, matrix, self.grid or other.grid, name)

    def __matmul__(self, other: "ObservableOp") -> "ObservableOp":
        return self._combine(other, self.matrix @ other.matrix, f"{self.name}{other.name}")

    def commutator(self, other: "ObservableOp") -> "ObservableOp":
        """[A, B] = AB - BA (anti-Hermitian)."""
        matrix = self.matrix @ other.matrix - other.matrix @ self.matrix
        return self._combine(other, matrix, f"[{self.name},{other.name}]")

    def anticommutator(self, other: "ObservableOp") -> "ObservableOp":
        matrix = self.matrix @ other.matrix + other.matrix @ self.matrix
        return self._combine(other, matrix, f"{{{self.name},{other.name}}}")

    def scaled(self, factor: float) -> "ObservableOp":
        return ObservableOp(ObservableKind.CUSTOM, factor * self.matrix, self.grid, self.name)

    def __add__(self, other: "ObservableOp") -> "ObservableOp":
        return self._combine(other, self.matrix + other.matrix, f"{self.name}+{other.name}")

    def squared(self) -> "ObservableOp":
        return self._combine(self, self.matrix @ self.matrix, f"{self.name}²")


def _require_line(grid: GridSpec) -> int:
    if grid.dim != 1:
        raise ShapeError("grid observables are one-dimensional")
    return grid.n[0]


def position_op(grid: GridSpec) -> ObservableOp:
    _require_line(grid)
    return ObservableOp(ObservableKind.POSITION, sparse.diags(grid.axis(0)).tocsr(), grid, "x")


def derivative_matrix(grid: GridSpec) -> sparse.csr_matrix:
    """Centered first difference d/dx."""
    n = _require_line(grid)
    h = grid.spacing[0]
    return sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1]).tocsr() / (2.0 * h)


def laplacian_matrix(grid: GridSpec) -> sparse.csr_matrix:
    """3-point second difference d²/dx²."""
    n = _require_line(grid)
    h = grid.spacing[0]
    return sparse.diags(
        [np.ones(n - 1), -2.0 * np.ones(n), np.ones(n - 1)], [-1, 0, 1]
    ).tocsr() / h**2


def momentum_op(grid: GridSpec) -> ObservableOp:
    return ObservableOp(ObservableKind.MOMENTUM, -1j * derivative_matrix(grid), grid, "p")


def kinetic_op(grid: GridSpec, m: float = 1.0) -> ObservableOp:
    return ObservableOp(
        ObservableKind.HAMILTONIAN, (-0.5 / m) * laplacian_matrix(grid), grid, "T"
    )


def hamiltonian_op(
    grid: GridSpec,
    m: float = 1.0,
    potential: Optional[Potential] = None
) -> ObservableOp:
    """ĥ = -(1/2m) d²/dx² + V(x)."""
    matrix = (-0.5 / m) * laplacian_matrix(grid)
    if potential is not None:
        matrix = matrix + sparse.diags(potential.value(grid.axis(0)))
    return ObservableOp(ObservableKind.HAMILTONIAN, matrix.tocsr(), grid, "h")


def custom_op(matrix: Any, name: str = "A") -> ObservableOp:
    """Finite-dimensional observable from a matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError("observable matrices must be square")
    return ObservableOp(ObservableKind.CUSTOM, matrix, None, name)


PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_op(axis: str) -> ObservableOp:
    return custom_op(PAULI[axis], f"σ{axis}")
