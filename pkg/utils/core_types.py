"""
Shared vocabulary for every solver: boundary operators, interval problems,
eigenvalue estimates, tolerance policies and the error hierarchy
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Optional, Tuple

import numpy as np

from config.config import Config

logger = logging.getLogger(__name__)


class RobinSpectraError(ValueError):
    """Base class for every error raised by the solvers"""


class NonPositiveLength(RobinSpectraError):
    pass


class RadialWithoutNeumannCore(RobinSpectraError):
    pass


class InvalidDimension(RobinSpectraError):
    pass


class NonFiniteValue(RobinSpectraError):
    pass


class OutOfDomain(RobinSpectraError):
    pass


class UnsupportedRegime(RobinSpectraError):
    pass


class NoSignChange(RobinSpectraError):
    pass


class MaxIterations(RobinSpectraError):
    pass


class ShootingOverflow(RobinSpectraError):
    pass


class BracketFailure(RobinSpectraError):
    pass


class TooCoarse(RobinSpectraError):
    pass


class DegenerateGeometry(RobinSpectraError):
    pass


class InvalidMesh(RobinSpectraError):
    pass


class IndefiniteShift(RobinSpectraError):
    pass


class InsufficientData(RobinSpectraError):
    pass


class SolverFailure(RobinSpectraError):
    pass


class FitFailure(RobinSpectraError):
    pass


class ConfigError(RobinSpectraError):
    pass


class BoundaryKind(Enum):
    DIRICHLET = 'D'
    NEUMANN = 'N'
    ROBIN = 'R'


@dataclass(frozen=True)
class BoundaryOperator:
    """
    One boundary condition. Robin(0) is stored as Neumann so the two compare
    and hash equal; Dirichlet carries no coefficient.
    """
    kind: BoundaryKind
    beta: Optional[float] = None

    def __post_init__(self):
        if self.kind is BoundaryKind.DIRICHLET:
            if self.beta is not None:
                raise ConfigError("Dirichlet boundary takes no coefficient")
            return
        beta = 0.0 if self.beta is None else float(self.beta)
        if not math.isfinite(beta):
            raise NonFiniteValue(f"Robin coefficient must be finite, got {self.beta}")
        if self.kind is BoundaryKind.ROBIN and beta == 0.0:
            object.__setattr__(self, 'kind', BoundaryKind.NEUMANN)
        if self.kind is BoundaryKind.NEUMANN and beta != 0.0:
            raise ConfigError("Neumann boundary has coefficient 0")
        # -0.0 and 0.0 must hash alike
        object.__setattr__(self, 'beta', beta + 0.0)

    @classmethod
    def dirichlet(cls):
        return cls(BoundaryKind.DIRICHLET)

    @classmethod
    def neumann(cls):
        return cls(BoundaryKind.NEUMANN, 0.0)

    @classmethod
    def robin(cls, beta):
        return cls(BoundaryKind.ROBIN, beta)

    @classmethod
    def parse(cls, kind, beta=None):
        """
        Build an operator from a one-letter tag

        Args:
            kind: 'D', 'N' or 'R' (case-insensitive)
            beta: Robin coefficient, required for 'R'

        Returns:
            BoundaryOperator

        Raises:
            ConfigError: If the tag is unknown or the coefficient is missing
        """
        tag = str(kind).strip().upper()
        if tag == 'D':
            return cls.dirichlet()
        if tag == 'N':
            return cls.neumann()
        if tag == 'R':
            if beta is None:
                raise ConfigError("Robin boundary needs a coefficient")
            try:
                return cls.robin(float(beta))
            except (TypeError, ValueError) as e:
                if isinstance(e, RobinSpectraError):
                    raise
                raise ConfigError(f"Invalid Robin coefficient: {beta}") from e
        raise ConfigError(f"Unknown boundary kind: {kind}")

    @property
    def is_dirichlet(self):
        return self.kind is BoundaryKind.DIRICHLET

    @property
    def coefficient(self):
        """Finite coefficient; raises for Dirichlet"""
        if self.is_dirichlet:
            raise UnsupportedRegime("Dirichlet boundary has no finite coefficient")
        return self.beta

    @property
    def effective_beta(self):
        """Coefficient with Dirichlet as +inf, the top of the monotone order"""
        return math.inf if self.is_dirichlet else self.beta

    def __str__(self):
        if self.kind is BoundaryKind.ROBIN:
            return f"R({self.beta:g})"
        return self.kind.value


@dataclass(frozen=True)
class Problem1D:
    """-u'' = sigma u on (0, L), optionally with the radial weight r^(N-1)"""
    length: float
    left: BoundaryOperator
    right: BoundaryOperator
    radial_dimension: int = 1

    def swapped(self):
        """Endpoint reflection x -> L - x"""
        return replace(self, left=self.right, right=self.left)

    def rescaled(self, factor):
        """Problem on (0, factor*L); eigenvalues scale by factor**-2"""
        def scale(op):
            if op.is_dirichlet or op.beta == 0.0:
                return op
            return BoundaryOperator.robin(op.beta / factor)
        return replace(self, length=self.length * factor,
                       left=scale(self.left), right=scale(self.right))

    def __str__(self):
        suffix = f", N={self.radial_dimension}" if self.radial_dimension > 1 else ""
        return f"({self.left}, {self.right}, L={self.length:g}{suffix})"


def validate(problem):
    """
    Check the interval invariants

    Args:
        problem: Problem1D to check

    Returns:
        Problem1D: The same problem, unchanged

    Raises:
        NonPositiveLength: If the length is not a positive finite number
        RadialWithoutNeumannCore: If a radial problem lacks Neumann at r = 0
    """
    if not math.isfinite(problem.length) or problem.length <= 0:
        raise NonPositiveLength(f"Interval length must be positive, got {problem.length}")
    if problem.radial_dimension < 1:
        raise InvalidDimension(f"Radial dimension must be >= 1, got {problem.radial_dimension}")
    if problem.radial_dimension >= 2 and problem.left != BoundaryOperator.neumann():
        raise RadialWithoutNeumannCore(
            f"Radial problem with N={problem.radial_dimension} needs Neumann at r=0, got {problem.left}"
        )
    return problem


class EigenMethod(Enum):
    CLOSED_FORM = 'ClosedForm'
    TRANSCENDENTAL_ROOT = 'TranscendentalRoot'
    SHOOTING = 'Shooting'
    TRIDIAGONAL = 'Tridiagonal'
    FEM = 'FEM'


@dataclass(frozen=True)
class EigenEstimate:
    """
    Principal eigenvalue with its eigenfunction. The eigenfunction is any
    callable accepting scalars or arrays and is max-normalized to 1.
    """
    value: float
    residual: float
    method: EigenMethod
    eigenfunction: Callable[[Any], Any]
    domain: Optional[Tuple[float, float]] = None
    iterations: int = 0
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise NonFiniteValue(f"Eigenvalue must be finite, got {self.value}")
        if not math.isfinite(self.residual) or self.residual < 0:
            raise NonFiniteValue(f"Residual must be finite and non-negative, got {self.residual}")

    def sample(self, points):
        """Evaluate the eigenfunction at an array of points"""
        points = np.asarray(points, dtype=float)
        if self.domain is not None:
            lo, hi = self.domain
            slack = 1e-12 * max(1.0, abs(hi - lo))
            if np.any(points < lo - slack) or np.any(points > hi + slack):
                raise OutOfDomain(f"Points outside [{lo:g}, {hi:g}]")
            points = np.clip(points, lo, hi)
        return np.asarray(self.eigenfunction(points), dtype=float)


@dataclass(frozen=True)
class TolerancePolicy:
    root_abs_tol: float = 1e-12
    eig_rel_tol: float = 1e-10
    max_iterations: int = 200

    def __post_init__(self):
        for name in ('root_abs_tol', 'eig_rel_tol'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive, got {value}")
        if int(self.max_iterations) < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")

    @classmethod
    def from_config(cls, config_class=Config):
        """Closed-form and root-finding defaults from the configuration"""
        return cls(config_class.ROOT_ABS_TOL, config_class.EIG_REL_TOL,
                   config_class.MAX_ITERATIONS)

    @classmethod
    def for_discretization(cls, config_class=Config):
        """Defaults for shooting, tridiagonal and FEM solvers"""
        return cls(config_class.ROOT_ABS_TOL, config_class.DISCRETE_REL_TOL,
                   config_class.MAX_ITERATIONS)

    def with_overrides(self, root_abs_tol=None, eig_rel_tol=None, max_iterations=None):
        """Copy with the given fields replaced; None keeps the current value"""
        changes = {}
        if root_abs_tol is not None:
            changes['root_abs_tol'] = root_abs_tol
        if eig_rel_tol is not None:
            changes['eig_rel_tol'] = eig_rel_tol
        if max_iterations is not None:
            changes['max_iterations'] = max_iterations
        return replace(self, **changes)
