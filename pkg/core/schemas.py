"""
Core schemas for Hilbert Embedding Lab.

These schemas define the canonical declarative inputs (grids, kernels,
potentials, physical parameters, experiment configs) and the structured
outputs (checks, hit reports, run reports) of the system.
All schemas are designed to be stable across versions.
"""

import math
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Literal, Optional
from uuid import UUID, uuid4

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class KernelKind(str, Enum):
    """
    Family of bilinear-form kernel.

    - EUCLID: e^{-L²(x-y)²/2}, positive definite
    - MINKOWSKI: e^{-L²(x-y)²/2 + L²(t-s)²/2}, indefinite (Krein)
    - CURVED: e^{-L²(x-y)²/2 + L²(1+u(x)+u(y))(t-s)²/2}, indefinite
    """
    EUCLID = "euclid"
    MINKOWSKI = "minkowski"
    CURVED = "curved"


class PotentialKind(str, Enum):
    """
    Closed-form potentials usable from configs.

    - ZERO: V = 0
    - LINEAR: V = g (x - c)
    - HARMONIC: V = k (x - c)² / 2
    """
    ZERO = "zero"
    LINEAR = "linear"
    HARMONIC = "harmonic"


class ActionKind(str, Enum):
    """
    Variational problem family.

    - CLASSICAL: S = ∫ [m/2 (da/dt)² - V(a)] dt
    - RELATIVISTIC: S = m/2 ∫ ||da/dτ||²_η dτ
    - CURVED: S = m/2 ∫ g_μν da^μ da^ν dτ with ds² = (1+2u)dt² - dx²
    """
    CLASSICAL = "classical"
    RELATIVISTIC = "relativistic"
    CURVED = "curved"


class ExperimentKind(str, Enum):
    """Experiments the runner can dispatch."""
    METRIC = "metric"
    ACTION = "action"
    SPIN = "spin"
    PACKET = "packet"
    UNCERTAINTY = "uncertainty"
    BORN = "born"
    DIFFUSE = "diffuse"
    ALL = "all"


class ExperimentCategory(str, Enum):
    """
    Physical regime an experiment belongs to.

    - CLASSICAL: delta-state manifolds with Euclidean metric
    - RELATIVISTIC: Krein-space kernels and curved metrics
    - QUANTUM: Schrödinger dynamics and state-space geometry
    - STOCHASTIC: Monte Carlo collapse models
    """
    CLASSICAL = "CLASSICAL"
    RELATIVISTIC = "RELATIVISTIC"
    QUANTUM = "QUANTUM"
    STOCHASTIC = "STOCHASTIC"


class Potential(BaseModel):
    """
    A one-dimensional potential V(x) (or u(x) for curved kernels).

    Evaluation is vectorized over numpy arrays.
    """
    kind: PotentialKind = Field(
        default=PotentialKind.ZERO,
        description="Potential family"
    )
    strength: float = Field(
        default=0.0,
        description="g for linear potentials, k for harmonic potentials"
    )
    center: float = Field(
        default=0.0,
        description="Reference point c of the potential"
    )

    class Config:
        frozen = True
        extra = "forbid"
        json_schema_extra = {
            "example": {"kind": "linear", "strength": 0.5, "center": 0.0}
        }

    def value(self, x: Any) -> np.ndarray:
        """Evaluate V at x."""
        x = np.asarray(x, dtype=float)
        if self.kind == PotentialKind.LINEAR:
            return self.strength * (x - self.center)
        if self.kind == PotentialKind.HARMONIC:
            return 0.5 * self.strength * (x - self.center) ** 2
        return np.zeros_like(x)

    def gradient(self, x: Any) -> np.ndarray:
        """Evaluate dV/dx at x."""
        x = np.asarray(x, dtype=float)
        if self.kind == PotentialKind.LINEAR:
            return np.full_like(x, self.strength)
        if self.kind == PotentialKind.HARMONIC:
            return self.strength * (x - self.center)
        return np.zeros_like(x)


class GridSpec(BaseModel):
    """
    Uniform sample grid on a 1-D interval or a 2-D rectangle.

    For dim=2 the axes are ordered (x, t): spatial first, temporal second.
    Scalars passed for lo, hi or n are broadcast to every axis.
    """
    dim: int = Field(ge=1, le=2, description="Number of axes (1 or 2)")
    lo: tuple[float, ...] = Field(description="Lower bound per axis")
    hi: tuple[float, ...] = Field(description="Upper bound per axis")
    n: tuple[int, ...] = Field(description="Samples per axis (>= 16)")

    class Config:
        frozen = True
        extra = "forbid"
        json_schema_extra = {
            "example": {"dim": 1, "lo": [-20.0], "hi": [20.0], "n": [2048]}
        }

    @model_validator(mode="before")
    @classmethod
    def _broadcast_scalars(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            dim = int(data.get("dim", 1))
            for key in ("lo", "hi", "n"):
                value = data.get(key)
                if isinstance(value, (int, float)):
                    data[key] = (value,) * dim
        return data

    @model_validator(mode="after")
    def _check_axes(self) -> "GridSpec":
        for name in ("lo", "hi", "n"):
            if len(getattr(self, name)) != self.dim:
                raise ValueError(f"{name} must have one entry per axis ({self.dim})")
        for axis in range(self.dim):
            if self.n[axis] < 16:
                raise ValueError(f"n[{axis}] must be at least 16")
            if not self.hi[axis] > self.lo[axis]:
                raise ValueError(f"hi[{axis}] must exceed lo[{axis}]")
        return self

    @classmethod
    def line(cls, lo: float, hi: float, n: int) -> "GridSpec":
        """Build a 1-D grid."""
        return cls(dim=1, lo=(lo,), hi=(hi,), n=(n,))

    @classmethod
    def plane(
        cls,
        x_axis: tuple[float, float, int],
        t_axis: tuple[float, float, int]
    ) -> "GridSpec":
        """Build a 1+1-D grid from (lo, hi, n) triples for x and t."""
        return cls(
            dim=2,
            lo=(x_axis[0], t_axis[0]),
            hi=(x_axis[1], t_axis[1]),
            n=(x_axis[2], t_axis[2]),
        )

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.n)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (self.hi[axis] - self.lo[axis]) / (self.n[axis] - 1)
            for axis in range(self.dim)
        )

    def axis(self, index: int) -> np.ndarray:
        """Sample coordinates along one axis."""
        return np.linspace(self.lo[index], self.hi[index], self.n[index])

    def axes(self) -> list[np.ndarray]:
        return [self.axis(index) for index in range(self.dim)]

    def mesh(self) -> list[np.ndarray]:
        """Coordinate arrays broadcast to the grid shape (ij indexing)."""
        return np.meshgrid(*self.axes(), indexing="ij")

    def contains(self, point: Any, margin: float = 0.0) -> bool:
        """Whether point lies inside the grid with the given margin on every axis."""
        coords = np.atleast_1d(np.asarray(point, dtype=float))
        if coords.size != self.dim:
            return False
        return all(
            self.lo[axis] + margin <= coords[axis] <= self.hi[axis] - margin
            for axis in range(self.dim)
        )


class KernelSpec(BaseModel):
    """
    A bilinear-form kernel k(x, y) on configuration space or spacetime.

    Minkowski and curved kernels act on 1+1-D grids (x, t). The scale L
    enters as e^{-L²(x-y)²/2}; with normalized=True the (L/√2π)^d
    coefficient is kept so that large L approaches the L2 product.
    """
    kind: KernelKind = Field(
        default=KernelKind.EUCLID,
        description="Kernel family"
    )
    scale: float = Field(
        default=1.0,
        gt=0.0,
        description="Kernel scale L"
    )
    potential: Optional[Potential] = Field(
        default=None,
        description="Function u of the curved kernel (curved only)"
    )
    normalized: bool = Field(
        default=False,
        description="Keep the (L/sqrt(2 pi))^d coefficient"
    )

    class Config:
        frozen = True
        extra = "forbid"
        json_schema_extra = {
            "example": {
                "kind": "curved",
                "scale": 1.0,
                "potential": {"kind": "linear", "strength": 0.5}
            }
        }

    @model_validator(mode="after")
    def _check_potential(self) -> "KernelSpec":
        if self.kind == KernelKind.CURVED and self.potential is None:
            raise ValueError("curved kernels require a potential u")
        return self

    @property
    def is_definite(self) -> bool:
        return self.kind == KernelKind.EUCLID


class ActionProblem(BaseModel):
    """
    A variational problem for a material point.

    Positions are 1-D; relativistic and curved problems are parameterized
    by coordinate time when optimized.
    """
    kind: ActionKind = Field(default=ActionKind.CLASSICAL)
    m: float = Field(default=1.0, gt=0.0, description="Mass")
    potential: Potential = Field(
        default_factory=Potential,
        description="V for classical problems, u for curved problems"
    )
    window: tuple[float, float] = Field(
        default=(0.0, 1.0),
        description="Time window [t0, t1]"
    )

    class Config:
        frozen = True
        extra = "forbid"

    @field_validator("window")
    @classmethod
    def _check_window(cls, value: tuple[float, float]) -> tuple[float, float]:
        if not value[1] > value[0]:
            raise ValueError("window must satisfy t1 > t0")
        return value

    def force(self, x: Any) -> np.ndarray:
        """
        Acceleration field of the reduced equations of motion.

        Classical problems use -V'/m; curved problems use the weak-field
        law dv/dt = -u'; relativistic problems are free.
        """
        if self.kind == ActionKind.CLASSICAL:
            return -self.potential.gradient(x) / self.m
        if self.kind == ActionKind.CURVED:
            return -self.potential.gradient(x)
        return np.zeros_like(np.asarray(x, dtype=float))


class TwoLevelSystem(BaseModel):
    """
    Two-level system ĥ_M = M - μB σ_z with the field along z.

    The intended regime is M ≫ μB; it is not enforced.
    """
    M: float = Field(gt=0.0, description="Rest-energy scale M")
    mu_B: float = Field(default=0.0, description="Product μB")
    axis: Literal["z"] = Field(default="z", description="Field direction")

    class Config:
        frozen = True
        extra = "forbid"
        json_schema_extra = {"example": {"M": 10.0, "mu_B": 1.0, "axis": "z"}}


class PacketParams(BaseModel):
    """
    Gaussian packet under uniform acceleration.

    elapsed is the spreading age at t=0: the time since the packet had
    width sigma. It is nonzero for packets produced by a width reset.
    """
    sigma: float = Field(default=1.0, gt=0.0, description="Initial width")
    m: float = Field(default=1.0, gt=0.0, description="Mass")
    x0: float = Field(default=0.0, description="Center at t=0")
    v0: float = Field(default=0.0, description="Group velocity at t=0")
    w: float = Field(default=0.0, description="Acceleration -V'/m")
    elapsed: float = Field(default=0.0, ge=0.0, description="Spreading age")

    class Config:
        frozen = True
        extra = "forbid"
        json_schema_extra = {
            "example": {"sigma": 1.0, "m": 1.0, "x0": 0.0, "v0": 2.0, "w": 0.5}
        }

    def center(self, t: float) -> float:
        return self.x0 + self.v0 * t + 0.5 * self.w * t * t

    def velocity(self, t: float) -> float:
        return self.v0 + self.w * t


class WalkConfig(BaseModel):
    """
    Parameters of the diffusion-collapse random walk.

    Trials draw from generators seeded by (seed, trial_index).
    """
    step_len: float = Field(
        default=0.05,
        gt=0.0,
        le=0.05,
        description="Fubini-Study length of one step"
    )
    max_steps: int = Field(default=20000, gt=0, description="Step budget per trial")
    absorb_tol: float = Field(
        default=0.05,
        gt=0.0,
        description="Fubini-Study absorption radius around targets"
    )
    seed: int = Field(default=0, ge=0)
    n_trials: int = Field(default=10000, gt=0)
    n_modes: int = Field(
        default=16,
        ge=2,
        le=64,
        description="Oscillator modes of the truncated state space"
    )
    confidence: float = Field(default=0.95, gt=0.0, lt=1.0)
    batch_size: int = Field(default=2048, gt=0, description="Trials stepped together")

    class Config:
        frozen = True
        extra = "forbid"

    @model_validator(mode="after")
    def _check_tolerance(self) -> "WalkConfig":
        if self.absorb_tol > self.step_len:
            raise ValueError("absorb_tol must not exceed step_len")
        return self


class TargetHit(BaseModel):
    """Absorption statistics for one target."""
    fs_distance: float = Field(description="Fubini-Study distance from the start")
    hits: int = Field(ge=0)
    trials: int = Field(ge=0, description="Absorbed trials (denominator)")
    frequency: float = Field(ge=0.0, le=1.0)
    ci_low: float = Field(ge=0.0, le=1.0)
    ci_high: float = Field(ge=0.0, le=1.0)
    born_reference: float = Field(
        description="cos²ρ normalized over all targets"
    )


class HitReport(BaseModel):
    """Outcome of a diffusion-collapse run."""
    targets: list[TargetHit]
    n_trials: int
    n_absorbed: int
    mean_steps: float
    seed: int
    step_len: float
    absorb_tol: float


class CheckResult(BaseModel):
    """
    A named acceptance check with explicit pass/fail.

    value is the measured quantity; target and tolerance describe the bar.
    """
    name: str
    value: float
    target: Optional[float] = None
    tolerance: Optional[float] = None
    passed: bool
    description: str = ""

    @classmethod
    def within(
        cls,
        name: str,
        value: float,
        target: float,
        tolerance: float,
        description: str = ""
    ) -> "CheckResult":
        """Pass when |value - target| <= tolerance."""
        value = float(value)
        passed = math.isfinite(value) and abs(value - target) <= tolerance
        return cls(
            name=name, value=value, target=target, tolerance=tolerance,
            passed=passed, description=description
        )

    @classmethod
    def below(
        cls,
        name: str,
        value: float,
        limit: float,
        description: str = ""
    ) -> "CheckResult":
        """Pass when value < limit."""
        value = float(value)
        return cls(
            name=name, value=value, target=0.0, tolerance=limit,
            passed=math.isfinite(value) and value < limit,
            description=description
        )

    @classmethod
    def above(
        cls,
        name: str,
        value: float,
        limit: float,
        description: str = ""
    ) -> "CheckResult":
        """Pass when value > limit."""
        value = float(value)
        return cls(
            name=name, value=value, target=limit, tolerance=None,
            passed=math.isfinite(value) and value > limit,
            description=description
        )

    @classmethod
    def holds(
        cls,
        name: str,
        condition: bool,
        value: float = 0.0,
        description: str = ""
    ) -> "CheckResult":
        """Pass when a boolean property holds."""
        return cls(
            name=name, value=float(value), passed=bool(condition),
            description=description
        )


class Table(BaseModel):
    """Plot-ready tabular output of an experiment."""
    name: str = Field(description="File stem of the CSV artifact")
    columns: list[str]
    rows: list[list[float]]


class ExperimentDefinition(BaseModel):
    """
    Defines an experiment type that can be run by the harness.

    Experiments are registered at startup and define their parameters
    through a JSON schema.
    """
    experiment_id: str = Field(
        description="Unique identifier for this experiment (e.g., 'metric')"
    )
    experiment_version: str = Field(
        description="Version of the experiment implementation (semver recommended)"
    )
    display_name: str = Field(description="Human-readable name")
    description: str = Field(description="What the experiment verifies")
    category: ExperimentCategory = Field(description="Physical regime")
    config_schema: dict[str, Any] = Field(
        description="JSON Schema of the experiment parameters"
    )

    class Config:
        json_schema_extra = {
            "example": {
                "experiment_id": "metric",
                "experiment_version": "1.0.0",
                "display_name": "Kernel Metrics",
                "description": "Induced metrics and delta-path speeds",
                "category": "CLASSICAL",
                "config_schema": {
                    "type": "object",
                    "properties": {"eps": {"type": "number"}},
                    "additionalProperties": False
                }
            }
        }


class ExperimentConfig(BaseModel):
    """
    Declarative description of a run.

    Parameters are validated against the selected experiment's schema
    before dispatch; unknown keys are rejected at both levels.
    """
    experiment: ExperimentKind = Field(description="Experiment to run")
    parameters: dict[str, Any] = Field(
        default_factory=dict,
        description="Experiment parameters (per-experiment schema)"
    )
    output_dir: Optional[str] = Field(
        default=None,
        description="Directory for report.json and CSV tables"
    )
    seed: int = Field(default=0, ge=0, description="Seed for all random draws")

    class Config:
        extra = "forbid"
        json_schema_extra = {
            "example": {
                "experiment": "born",
                "parameters": {"sigma": 1.0, "sweep_points": 21},
                "output_dir": "results",
                "seed": 7
            }
        }


class ExperimentResult(BaseModel):
    """Checks, scalar data and tables produced by one experiment."""
    experiment_id: str
    checks: list[CheckResult] = Field(default_factory=list)
    data: dict[str, Any] = Field(default_factory=dict)
    tables: list[Table] = Field(default_factory=list, exclude=True)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class Report(BaseModel):
    """
    Structured result of a run.

    Everything except run_id and the wall-clock fields is reproducible
    bit-for-bit from (config, seed).
    """
    run_id: UUID = Field(default_factory=uuid4)
    experiment: str
    version: str
    config: dict[str, Any]
    seed: int
    results: list[ExperimentResult] = Field(default_factory=list)
    tables: list[str] = Field(default_factory=list, description="CSV artifact paths")
    started_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    finished_at: Optional[datetime] = None

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def checks(self) -> list[CheckResult]:
        return [check for result in self.results for check in result.checks]

    def payload(self) -> dict[str, Any]:
        """Report content without run identity and wall-clock fields."""
        return self.model_dump(
            mode="json",
            exclude={"run_id", "started_at", "finished_at"}
        )


class RunSummary(BaseModel):
    """One row of the run history."""
    run_id: UUID
    experiment: str
    version: str
    seed: int
    passed: bool
    n_checks: int
    n_failed: int
    started_at: datetime
