"""
Kernel metric experiment for Hilbert Embedding Lab.

Induced metrics of the Euclidean, Minkowski and curved kernels, delta-path
speeds and their ε² convergence, Krein signs and the geometry of the
delta-state manifold.
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from core.grid import StateFunction
from core.kernel_metrics import (
    DeltaPath,
    delta_path_speed,
    finite_difference_metric,
    geodesic_length,
    gram_matrix,
    induced_metric,
    krein_sign,
)
from core.schemas import (
    CheckResult,
    ExperimentCategory,
    ExperimentDefinition,
    ExperimentResult,
    GridSpec,
    KernelKind,
    KernelSpec,
    Potential,
    PotentialKind,
    Table,
)
from plugins.base import ExperimentBase


class MetricParams(BaseModel):
    """Parameters of the kernel metric experiment."""
    n_points: int = Field(default=10, ge=1, le=100, description="Random points for the identity check")
    velocity: float = Field(default=2.0, gt=0.0, description="Label speed of the straight delta path")
    eps_values: list[float] = Field(
        default=[0.2, 0.1, 0.05],
        min_length=2,
        description="Delta widths for the speed convergence sweep, decreasing"
    )
    path_dt: float = Field(default=1e-3, gt=0.0, le=1e-2)
    minkowski_eps: float = Field(default=0.02, gt=0.0)
    boost: tuple[float, float] = Field(
        default=(0.75, 1.25),
        description="(dx/dτ, dt/dτ) of the boosted Minkowski line"
    )
    curved_strength: float = Field(default=0.1, description="g of u(x) = g·x for the curved kernel")
    krein_n: int = Field(default=97, ge=33, description="Samples per axis of the Krein grid")
    krein_half_width: float = Field(default=6.0, gt=0.0)
    speed_tolerance: float = Field(default=1e-2, gt=0.0)

    class Config:
        extra = "forbid"


class MetricExperiment(ExperimentBase):
    """
    Experiment for the metrics induced on delta states.

    Checks:
    - euclid induced metric equals the identity at random points
    - analytic metrics agree with finite differences of the kernel
    - straight-path speeds converge to |v| as O(ε²)
    - Minkowski speed of a boosted line equals its proper speed
    - Krein squares of even and odd states have opposite signs
    """

    Params = MetricParams

    def get_definition(self) -> ExperimentDefinition:
        return ExperimentDefinition(
            experiment_id="metric",
            experiment_version="1.0.0",
            display_name="Kernel Metrics",
            description=(
                "Induced metrics of Gaussian kernels on delta states, "
                "delta-path speeds and Krein signs."
            ),
            category=ExperimentCategory.CLASSICAL,
            config_schema=MetricParams.model_json_schema(),
        )

    def run(
        self,
        params: MetricParams,
        seed: int,
        parallel_trials: Optional[int] = None
    ) -> ExperimentResult:
        rng = np.random.default_rng(seed)
        checks: list[CheckResult] = []
        data: dict = {}
        euclid = KernelSpec(kind=KernelKind.EUCLID)

        # Identity metric at random points
        points = rng.uniform(-5.0, 5.0, (params.n_points, 3))
        gap = max(
            float(np.max(np.abs(induced_metric(euclid, point).g - np.eye(3))))
            for point in points
        )
        checks.append(CheckResult.below(
            "euclid_metric_identity", gap, 1e-12,
            "max |g - I| of the euclid induced metric over random points"
        ))

        curved = KernelSpec(
            kind=KernelKind.CURVED,
            potential=Potential(kind=PotentialKind.LINEAR, strength=params.curved_strength),
        )
        fd_gap = 0.0
        for kernel in (euclid, KernelSpec(kind=KernelKind.MINKOWSKI), curved):
            point = rng.uniform(-1.0, 1.0, 2)
            analytic = induced_metric(kernel, point).g
            numeric = finite_difference_metric(kernel, point)
            fd_gap = max(fd_gap, float(np.max(np.abs(analytic - numeric))))
        checks.append(CheckResult.below(
            "metric_finite_difference", fd_gap, 1e-6,
            "analytic induced metrics against central differences of the kernel"
        ))

        # Straight-line speed and its convergence in eps
        v = params.velocity
        rows = []
        for eps in params.eps_values:
            path = DeltaPath.from_function(lambda t: v * t, -params.path_dt, params.path_dt, params.path_dt, eps)
            speed = delta_path_speed(euclid, path, 0.0)
            rows.append([eps, speed, abs(speed - v) / v])
        errors = [row[2] for row in rows]
        checks.append(CheckResult.below(
            "delta_speed_equality", errors[-1], params.speed_tolerance,
            f"relative speed error at eps={params.eps_values[-1]}"
        ))
        ratio = errors[-2] / errors[-1] if errors[-1] > 0 else math.inf
        expected = (params.eps_values[-2] / params.eps_values[-1]) ** 2
        checks.append(CheckResult.within(
            "delta_speed_order", ratio, expected, 0.25 * expected,
            "error ratio between the two finest widths, O(eps²) decay"
        ))

        minkowski = KernelSpec(kind=KernelKind.MINKOWSKI)
        dx, dt = params.boost
        boosted = DeltaPath.from_function(
            lambda s: np.array([dx * s, dt * s]), -params.path_dt, params.path_dt,
            params.path_dt, params.minkowski_eps,
        )
        proper = math.sqrt(abs(dt**2 - dx**2))
        minkowski_speed = delta_path_speed(minkowski, boosted, 0.0)
        checks.append(CheckResult.within(
            "minkowski_proper_speed", minkowski_speed, proper, params.speed_tolerance * proper,
            "kernel speed of a boosted line against sqrt(dt² - dx²)"
        ))

        # Krein signs
        half = params.krein_half_width
        grid = GridSpec.plane((-half, half, params.krein_n), (-half, half, params.krein_n))
        even = StateFunction.from_callable(
            grid, lambda x, t: np.exp(-t**2) * np.exp(-t**2 / 2.0) * np.exp(-x**2 / 2.0)
        )
        odd = even.with_values(even.values * grid.mesh()[1])
        even_square = krein_sign(even)
        odd_square = krein_sign(odd)
        checks.append(CheckResult.above("krein_even_positive", even_square, 0.0))
        checks.append(CheckResult.holds(
            "krein_odd_negative", odd_square < 0.0, odd_square
        ))

        # Manifold geometry
        length = geodesic_length(euclid, 0.0, 2.0, params.eps_values[-1])
        checks.append(CheckResult.within(
            "geodesic_isometry", length, 2.0, 2.0 * params.speed_tolerance,
            "kernel length of the straight label path from 0 to 2"
        ))
        line = GridSpec.line(-10.0, 10.0, 2001)
        gram = gram_matrix([-2.0, -1.0, 0.0, 1.0, 2.0], 1.0, line)
        smallest = float(np.min(np.linalg.eigvalsh(gram)))
        checks.append(CheckResult.above(
            "delta_states_independent", smallest, 0.0,
            "smallest Gram eigenvalue of five delta states"
        ))

        data.update({
            "minkowski_speed": minkowski_speed,
            "proper_speed": proper,
            "krein_even": even_square,
            "krein_odd": odd_square,
            "gram_min_eigenvalue": smallest,
        })
        table = Table(name="speed_convergence", columns=["eps", "speed", "rel_error"], rows=rows)
        return ExperimentResult(experiment_id="metric", checks=checks, data=data, tables=[table])
