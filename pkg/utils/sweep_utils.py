"""
Parameter sweeps over a geometric grid of lengths, radii or sides, run on a
bounded worker pool and classified by fit_rate
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from config.config import Config
from utils.core_types import (
    BoundaryOperator,
    ConfigError,
    EigenMethod,
    Problem1D,
    RobinSpectraError,
    TolerancePolicy,
)
from utils.exact1d_utils import principal_eigenvalue_1d
from utils.fem_utils import principal_eigenvalue_fem
from utils.fit_utils import FittedModel, fit_rate
from utils.mesh_utils import mesh_disk, mesh_rectangle
from utils.radial_utils import BallProblem, principal_eigenvalue_ball
from utils.tridiag_utils import principal_eigenvalue_tridiag

logger = logging.getLogger(__name__)


class SweepFamily(Enum):
    INTERVAL = 'interval'
    BALL = 'ball'
    SQUARE = 'square'
    DISK = 'disk'


SOLVERS = {
    SweepFamily.INTERVAL: ('exact', 'tridiag'),
    SweepFamily.BALL: ('shooting',),
    SweepFamily.SQUARE: ('fem',),
    SweepFamily.DISK: ('fem',),
}


@dataclass(frozen=True)
class SweepSpec:
    """
    One sweep: a family, its boundary data and the grid start * factor**k,
    k = 0 .. count - 1. Ball sweeps default to the scaled quantity R**2 sigma.
    """
    family: SweepFamily
    start: float
    factor: float
    count: int
    left: Optional[BoundaryOperator] = None
    right: Optional[BoundaryOperator] = None
    boundary: Optional[BoundaryOperator] = None
    dimension: int = 2
    solver: Optional[str] = None
    resolution: int = 0
    steps: int = 0
    tol: Optional[TolerancePolicy] = None
    quantity: Optional[str] = None
    exploratory_beta: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not (math.isfinite(self.start) and self.start > 0):
            raise ConfigError(f"Grid start must be positive, got {self.start}")
        if not 0 < self.factor < 1:
            raise ConfigError(f"Grid factor must lie in (0, 1), got {self.factor}")
        if int(self.count) < 3:
            raise ConfigError(f"Grid needs at least 3 points, got {self.count}")
        if self.family is SweepFamily.INTERVAL:
            if self.left is None or self.right is None:
                raise ConfigError("Interval sweeps need left and right boundary operators")
        elif self.boundary is None and self.exploratory_beta is None:
            raise ConfigError(f"{self.family.value} sweeps need a boundary operator or exploratory_beta")
        if self.exploratory_beta is not None and self.family not in (SweepFamily.SQUARE, SweepFamily.DISK):
            raise ConfigError("exploratory_beta applies to square and disk sweeps only")
        solver = self.solver or SOLVERS[self.family][0]
        if solver not in SOLVERS[self.family]:
            raise ConfigError(f"Solver '{solver}' is not available for {self.family.value} sweeps; "
                              f"choose from {', '.join(SOLVERS[self.family])}")
        object.__setattr__(self, 'solver', solver)
        quantity = self.quantity or ('scaled' if self.family is SweepFamily.BALL else 'sigma')
        if quantity not in ('sigma', 'scaled') or (quantity == 'scaled' and self.family is not SweepFamily.BALL):
            raise ConfigError(f"Unknown quantity '{quantity}' for {self.family.value} sweeps")
        object.__setattr__(self, 'quantity', quantity)
        if self.family is SweepFamily.BALL and self.dimension < 1:
            raise ConfigError(f"Ball dimension must be >= 1, got {self.dimension}")

    @property
    def grid(self):
        """Strictly decreasing scales"""
        return [self.start * self.factor ** k for k in range(int(self.count))]

    @property
    def policy(self):
        if self.tol is not None:
            return self.tol
        if self.family is SweepFamily.INTERVAL and self.solver == 'exact':
            return TolerancePolicy.from_config()
        return TolerancePolicy.for_discretization()

    def exploratory_field(self, scale):
        """beta(x, y) = a + b * x in coordinates normalized by the scale"""
        a, b = self.exploratory_beta
        return lambda x, y: a + b * x / scale

    def describe(self):
        if self.family is SweepFamily.INTERVAL:
            return f"interval({self.left}, {self.right}) via {self.solver}"
        if self.exploratory_beta is not None:
            a, b = self.exploratory_beta
            return f"{self.family.value}(beta = {a:g} + {b:g} x) via {self.solver} [exploratory]"
        suffix = f", N={self.dimension}, {self.quantity}" if self.family is SweepFamily.BALL else ''
        return f"{self.family.value}({self.boundary}{suffix}) via {self.solver}"


@dataclass(frozen=True)
class SweepRow:
    scale: float
    sigma: float
    residual: float
    method: str
    wall_ms: float = 0.0
    converged: bool = True
    message: str = ''


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: Tuple[SweepRow, ...]
    model: FittedModel
    exploratory: bool = False
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def converged_rows(self):
        return [row for row in self.rows if row.converged]


def evaluate_point(spec, scale):
    """
    Run the sweep's solver at one scale

    Returns:
        tuple: (value, residual, EigenMethod)
    """
    tol = spec.policy
    if spec.family is SweepFamily.INTERVAL:
        problem = Problem1D(scale, spec.left, spec.right)
        if spec.solver == 'tridiag':
            estimate = principal_eigenvalue_tridiag(problem, spec.resolution or Config.TRIDIAG_CELLS, tol)
        else:
            estimate = principal_eigenvalue_1d(problem, tol)
        return estimate.value, estimate.residual, estimate.method

    if spec.family is SweepFamily.BALL:
        steps = spec.steps or Config.SHOOTING_STEPS
        if spec.quantity == 'scaled':
            boundary = spec.boundary
            if not boundary.is_dirichlet:
                boundary = BoundaryOperator.robin(boundary.beta * scale)
            estimate = principal_eigenvalue_ball(BallProblem(spec.dimension, 1.0, boundary), tol, steps)
        else:
            estimate = principal_eigenvalue_ball(BallProblem(spec.dimension, scale, spec.boundary), tol, steps)
        return estimate.value, estimate.residual, estimate.method

    resolution = spec.resolution or Config.FEM_RESOLUTION
    if spec.family is SweepFamily.SQUARE:
        mesh = mesh_rectangle(scale, scale, resolution, spec.boundary)
    else:
        mesh = mesh_disk(scale, resolution, spec.boundary)
    beta = spec.exploratory_field(scale) if spec.exploratory_beta is not None else None
    estimate = principal_eigenvalue_fem(mesh, beta, tol)
    return estimate.value, estimate.residual, estimate.method


def _run_point(spec, scale):
    started = time.perf_counter()
    try:
        value, residual, method = evaluate_point(spec, scale)
    except RobinSpectraError as e:
        logger.warning(f"Sweep point {scale:.6g} of {spec.describe()} failed: {e}")
        return SweepRow(scale, math.nan, math.nan, spec.solver, (time.perf_counter() - started) * 1e3,
                        False, f"{type(e).__name__}: {e}")
    wall_ms = (time.perf_counter() - started) * 1e3
    name = method.value if isinstance(method, EigenMethod) else str(method)
    return SweepRow(scale, float(value), float(residual), name, wall_ms)


def run_sweep(spec, max_workers=None):
    """
    Evaluate every grid point and classify the trend

    Points run concurrently; rows come back in grid order. Failed points are
    kept as flagged rows and left out of the fit.

    Args:
        spec: SweepSpec
        max_workers: Worker cap (Config.THREADS by default)

    Returns:
        SweepResult

    Raises:
        FitFailure: If fewer than three rows converge
    """
    workers = max_workers or Config().worker_count
    grid = spec.grid
    logger.info(f"Sweeping {spec.describe()} over {len(grid)} scales "
                f"[{grid[0]:.6g} .. {grid[-1]:.6g}] with {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = tuple(executor.map(lambda scale: _run_point(spec, scale), grid))

    flagged = sum(1 for row in rows if not row.converged)
    if flagged:
        logger.warning(f"{flagged} of {len(rows)} sweep points failed and are excluded from the fit")
    model = fit_rate(rows)
    exploratory = spec.exploratory_beta is not None
    if exploratory:
        logger.info(f"Exploratory sweep recorded {model}; no limit is asserted for sign-changing beta")
    else:
        logger.info(f"Sweep fitted {model} (R^2 = {model.quality:.6f})")
    return SweepResult(spec, rows, model, exploratory)


def scaled_products(result, exponent=1):
    """sigma * scale**exponent for the converged rows, in grid order"""
    rows = result.converged_rows
    return np.array([row.sigma * row.scale ** exponent for row in rows])
