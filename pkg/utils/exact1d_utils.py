"""
Exact principal eigenvalue of -u'' = sigma u on (0, L) for every pairing of
Dirichlet, Neumann and Robin endpoints.

The sign of sigma is decided algebraically first. Closed forms cover the
Dirichlet/Neumann pairs, the zero-eigenvalue manifolds and the
antisymmetric pair beta_L = -beta_0; everything else is the first admissible
root of a tan- or tanh-type characteristic equation in s = sqrt(|sigma|).
Equal negative coefficients use the even-mode factor, whose root stays simple
where the even and odd modes merge.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from utils.core_types import (
    BoundaryKind,
    EigenEstimate,
    EigenMethod,
    MaxIterations,
    NoSignChange,
    OutOfDomain,
    TolerancePolicy,
    UnsupportedRegime,
    validate,
)

logger = logging.getLogger(__name__)

ZERO_GUARD = 1e-14
BRANCH_PULL_IN = 1e-9
CELLS_PER_HALF_BRANCH = 64
POSITIVE_HALF_BRANCHES = 8
NEGATIVE_CELLS = 512
NEGATIVE_BOUND_MARGIN = 1e-3


class SignRegime(Enum):
    POSITIVE = 'Positive'
    ZERO = 'Zero'
    NEGATIVE = 'Negative'


class CaseTag(Enum):
    DIRICHLET_NEUMANN_PAIR = 1
    ROBIN_DIRICHLET = 2
    DIRICHLET_ROBIN = 3
    ROBIN_NEUMANN = 4
    NEUMANN_ROBIN = 5
    ROBIN_ROBIN = 6


class LimitRate(NamedTuple):
    exponent: float
    coefficient: float


def case_tag(problem):
    """Classify the endpoint pairing"""
    left, right = problem.left, problem.right
    plain = (BoundaryKind.DIRICHLET, BoundaryKind.NEUMANN)
    if left.kind in plain and right.kind in plain:
        return CaseTag.DIRICHLET_NEUMANN_PAIR
    if left.is_dirichlet:
        return CaseTag.DIRICHLET_ROBIN
    if right.is_dirichlet:
        return CaseTag.ROBIN_DIRICHLET
    if left.kind is BoundaryKind.NEUMANN:
        return CaseTag.NEUMANN_ROBIN
    if right.kind is BoundaryKind.NEUMANN:
        return CaseTag.ROBIN_NEUMANN
    return CaseTag.ROBIN_ROBIN


def zero_condition_residual(problem):
    """
    Algebraic quantity whose vanishing means sigma_1 = 0

    For two finite coefficients it is b0 + bL + b0*bL*L; with one Dirichlet end
    it is b*L + 1 for the remaining coefficient b.

    Returns:
        tuple: (residual, scale) where scale bounds the rounding in residual
    """
    length = problem.length
    left, right = problem.left, problem.right
    if left.is_dirichlet and right.is_dirichlet:
        return 1.0, 1.0
    if left.is_dirichlet or right.is_dirichlet:
        beta = right.beta if left.is_dirichlet else left.beta
        return beta * length + 1.0, abs(beta) * length + 1.0
    b0, bl = left.beta, right.beta
    residual = b0 + bl + b0 * bl * length
    scale = abs(b0) + abs(bl) + abs(b0 * bl) * length
    return residual, scale


def _is_zero(residual, scale):
    return abs(residual) <= ZERO_GUARD * scale


def decide_sign(problem):
    """
    Sign of the principal eigenvalue, decided without root finding

    Args:
        problem: Validated interval problem with radial_dimension 1

    Returns:
        SignRegime
    """
    _require_plain_interval(problem)
    left, right = problem.left, problem.right
    if left.is_dirichlet and right.is_dirichlet:
        return SignRegime.POSITIVE

    residual, scale = zero_condition_residual(problem)
    if left.is_dirichlet or right.is_dirichlet:
        if _is_zero(residual, scale):
            return SignRegime.ZERO
        return SignRegime.POSITIVE if residual > 0 else SignRegime.NEGATIVE

    length = problem.length
    if left.beta * length + 1.0 > 0 or right.beta * length + 1.0 > 0:
        if _is_zero(residual, scale):
            return SignRegime.ZERO
        return SignRegime.POSITIVE if residual > 0 else SignRegime.NEGATIVE
    # both coefficients at or below -1/L: the affine zero mode, if any, changes sign
    return SignRegime.NEGATIVE


def _require_plain_interval(problem):
    validate(problem)
    if problem.radial_dimension != 1:
        raise UnsupportedRegime("Radial problems are solved by the shooting or tridiagonal solvers")


def _oriented(problem):
    """Move a lone Dirichlet end to the right by reflection"""
    if problem.left.is_dirichlet and not problem.right.is_dirichlet:
        return problem.swapped(), True
    return problem, False


@dataclass(frozen=True)
class CharacteristicEquation:
    """
    Mismatch function g(s) with the scan cells that localise its first
    admissible root. Cells are listed in scan order; with rising_only only
    g(a) < 0 < g(b) crossings qualify.
    """
    g: Callable[[float], float]
    cells: Tuple[Tuple[float, float], ...]
    bracket_hint: str
    case_tag: Optional[CaseTag] = None
    regime: Optional[SignRegime] = None
    rising_only: bool = False
    reflected: bool = False

    @classmethod
    def from_function(cls, g, bracket, cells=1, rising_only=False):
        """Equation over an explicit bracket split into equal cells"""
        edges = np.linspace(bracket[0], bracket[1], cells + 1)
        return cls(g=g, cells=tuple(zip(edges[:-1], edges[1:])),
                   bracket_hint=f"({bracket[0]:g}, {bracket[1]:g})", rising_only=rising_only)

    def __call__(self, s):
        return self.g(s)

    @property
    def search_range(self):
        lows = [cell[0] for cell in self.cells]
        highs = [cell[1] for cell in self.cells]
        return min(lows), max(highs)

    def locate_bracket(self):
        """
        First cell in scan order holding an admissible sign change

        Returns:
            tuple: (a, b) with g(a), g(b) of opposite signs

        Raises:
            NoSignChange: If no cell qualifies
        """
        for a, b in self.cells:
            ga, gb = self.g(a), self.g(b)
            if not (math.isfinite(ga) and math.isfinite(gb)):
                continue
            if self.rising_only:
                if ga < 0 <= gb or (ga == 0 and gb > 0):
                    return a, b
            elif ga * gb <= 0 and not (ga == 0 and gb == 0):
                return a, b

        if self.rising_only:
            bracket = self._dip_bracket()
            if bracket is not None:
                return bracket

        lo, hi = self.search_range
        raise NoSignChange(f"No sign change of g on the scanned range [{lo:.6g}, {hi:.6g}]")

    def _dip_bracket(self):
        """Two roots hidden in one cell: split it at the minimum of g"""
        for a, b in self.cells:
            ga, gb = self.g(a), self.g(b)
            if not (ga > 0 and gb > 0):
                continue
            found = minimize_scalar(self.g, bounds=(a, b), method='bounded',
                                    options={'xatol': 1e-14 * max(1.0, b)})
            if found.success and found.fun < 0:
                logger.debug(f"Split cell ({a:.6g}, {b:.6g}) at its minimum {found.x:.6g}")
                return float(found.x), b
        return None


def characteristic(problem, regime):
    """
    Characteristic equation for the principal eigenvalue

    Args:
        problem: Interval problem with radial_dimension 1
        regime: Sign regime from decide_sign

    Returns:
        CharacteristicEquation in s = sqrt(|sigma|)

    Raises:
        UnsupportedRegime: If the regime is Zero
    """
    if regime is SignRegime.ZERO:
        raise UnsupportedRegime("Zero regime has a closed form and no characteristic equation")
    _require_plain_interval(problem)
    tag = case_tag(problem)
    base, reflected = _oriented(problem)
    length = base.length

    if tag is CaseTag.DIRICHLET_NEUMANN_PAIR:
        if regime is not SignRegime.POSITIVE:
            raise UnsupportedRegime(f"Dirichlet/Neumann pair {problem} has no negative eigenvalue")
        both_dirichlet = base.left.is_dirichlet and base.right.is_dirichlet
        if both_dirichlet:
            g = lambda s: math.sin(s * length)
        else:
            g = lambda s: math.cos(s * length)
        cells = _uniform_cells(BRANCH_PULL_IN * math.pi / length, 2.0 * math.pi / length,
                               2 * CELLS_PER_HALF_BRANCH)
        return CharacteristicEquation(g=g, cells=cells, bracket_hint="(0, 2*pi/L)",
                                      case_tag=tag, regime=regime, reflected=reflected)

    b0 = base.left.beta
    if regime is SignRegime.POSITIVE:
        if base.right.is_dirichlet:
            g = lambda s: math.tan(s * length) + s / b0
        else:
            bl = base.right.beta
            product, total = b0 * bl, b0 + bl
            g = lambda s: (s - product / s) * math.tan(s * length) - total
        half = 0.5 * math.pi / length
        cells = _tangent_cells(half)
        hint = f"half-branches of width {half:.6g} from 0, first sign change"
        return CharacteristicEquation(g=g, cells=cells, bracket_hint=hint, case_tag=tag,
                                      regime=regime, reflected=reflected)

    if base.right.is_dirichlet:
        g = lambda s: s + b0 * math.tanh(s * length)
        pole = None
        negative_sum = max(0.0, -b0)
    elif base.right.beta == b0:
        # even mode cosh(s (x - L/2)); its factor has a simple root even when
        # the odd mode coincides with it in floating point
        g = lambda s: s * math.tanh(0.5 * s * length) + b0
        pole = None
        negative_sum = -b0
    else:
        bl = base.right.beta
        product, total = b0 * bl, b0 + bl
        g = lambda s: (s + product / s) * math.tanh(s * length) + total
        pole = math.sqrt(-product) if product < 0 else None
        negative_sum = max(0.0, -b0) + max(0.0, -bl)

    upper = math.sqrt(negative_sum ** 2 + negative_sum / length) * (1.0 + NEGATIVE_BOUND_MARGIN)
    upper = max(upper, 1e-12)
    for _ in range(60):
        if g(upper) > 0:
            break
        upper *= 2.0
    lower = BRANCH_PULL_IN * upper
    breaks = [lower, upper]
    if pole is not None and lower < pole < upper:
        breaks = [lower, pole, upper]
    cells = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        count = max(8, int(round(NEGATIVE_CELLS * (b - a) / (upper - lower))))
        cells.extend(_uniform_cells(a, b, count))
    cells.reverse()
    if pole is not None:
        hint = f"(0, {upper:.6g}] split at s0 = {pole:.6g}, largest rising crossing"
    else:
        hint = f"(0, {upper:.6g}], largest rising crossing"
    return CharacteristicEquation(g=g, cells=tuple(cells), bracket_hint=hint, case_tag=tag,
                                  regime=regime, rising_only=True, reflected=reflected)


def _uniform_cells(a, b, count):
    edges = np.linspace(a, b, count + 1)
    return tuple((float(x), float(y)) for x, y in zip(edges[:-1], edges[1:]))


def _tangent_cells(half):
    """Cells on successive half-branches, pulled in from the tan poles and from 0"""
    cells = []
    pull = BRANCH_PULL_IN * half
    for j in range(POSITIVE_HALF_BRANCHES):
        lo, hi = j * half, (j + 1) * half
        if j == 0 or j % 2 == 1:
            lo += pull
        if j % 2 == 0:
            hi -= pull
        cells.extend(_uniform_cells(lo, hi, CELLS_PER_HALF_BRANCH))
    return tuple(cells)


def first_root(equation, tol=None):
    """
    Refine the first admissible root of a characteristic equation

    Args:
        equation: CharacteristicEquation
        tol: TolerancePolicy (defaults from Config)

    Returns:
        float: root s*

    Raises:
        NoSignChange: If the bracket scan finds nothing
        MaxIterations: If the bracketed solver does not converge
    """
    tol = tol or TolerancePolicy.from_config()
    a, b = equation.locate_bracket()
    if equation(a) == 0:
        return a
    if equation(b) == 0:
        return b
    try:
        root, info = brentq(equation.g, a, b, xtol=tol.root_abs_tol,
                            maxiter=tol.max_iterations, full_output=True, disp=False)
    except RuntimeError as e:
        raise MaxIterations(f"Root refinement on ({a:.6g}, {b:.6g}) failed: {e}") from e
    if not info.converged:
        raise MaxIterations(f"Root refinement on ({a:.6g}, {b:.6g}) stopped after {info.iterations} iterations")
    return float(root)


@dataclass(frozen=True)
class Profile1D:
    """
    Closed-form eigenfunction on (0, L), max-normalized.

    form 'trig':   c0 cos(s y) + c1 sin(s y)
    form 'hyp':    c0 exp(s (y - L)) + c1 exp(-s y)
    form 'affine': c0 + c1 y
    with y = L - x when reflected, else y = x.
    """
    form: str
    s: float
    c0: float
    c1: float
    length: float
    reflected: bool = False
    scale: float = 1.0

    @classmethod
    def build(cls, form, s, c0, c1, length, reflected=False):
        raw = cls(form, s, c0, c1, length, reflected)
        peak = max(raw._base(y) for y in raw._candidates())
        return cls(form, s, c0, c1, length, reflected, 1.0 / peak)

    def _candidates(self):
        points = [0.0, self.length]
        if self.form == 'trig' and self.s > 0:
            period = math.pi / self.s
            start = math.atan2(self.c1, self.c0) / self.s
            for k in range(-2, 4):
                y = start + k * period
                if 0.0 < y < self.length:
                    points.append(y)
        return points

    def _base(self, y, order=0):
        s = self.s
        if self.form == 'trig':
            cos, sin = np.cos(s * y), np.sin(s * y)
            if order == 0:
                return self.c0 * cos + self.c1 * sin
            if order == 1:
                return s * (self.c1 * cos - self.c0 * sin)
            return -s * s * (self.c0 * cos + self.c1 * sin)
        if self.form == 'hyp':
            grow, decay = np.exp(s * (y - self.length)), np.exp(-s * y)
            if order == 1:
                return s * (self.c0 * grow - self.c1 * decay)
            return s ** order * (self.c0 * grow + self.c1 * decay)
        if order == 0:
            return self.c0 + self.c1 * y
        if order == 1:
            return self.c1 + 0.0 * y
        return 0.0 * y

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = self.length - x if self.reflected else x
        return self.scale * self._base(y)

    def derivative(self, x, order=1):
        """Exact derivative of order 1 or 2"""
        if order not in (1, 2):
            raise ValueError(f"Only first and second derivatives are available, got order {order}")
        x = np.asarray(x, dtype=float)
        y = self.length - x if self.reflected else x
        sign = -1.0 if (self.reflected and order == 1) else 1.0
        return sign * self.scale * self._base(y, order)


def principal_eigenvalue_1d(problem, tol=None):
    """
    Principal eigenvalue and eigenfunction of the interval problem

    Args:
        problem: Problem1D with radial_dimension 1
        tol: TolerancePolicy (defaults from Config)

    Returns:
        EigenEstimate with a Profile1D eigenfunction on (0, L)
    """
    tol = tol or TolerancePolicy.from_config()
    _require_plain_interval(problem)
    length = problem.length
    tag = case_tag(problem)
    domain = (0.0, length)

    if tag is CaseTag.DIRICHLET_NEUMANN_PAIR:
        value, profile = _dirichlet_neumann_pair(problem)
        return EigenEstimate(value, 0.0, EigenMethod.CLOSED_FORM, profile, domain,
                             details={'case': tag.name, 'regime': _regime_of(value).name})

    base, reflected = _oriented(problem)
    regime = decide_sign(problem)
    if regime is SignRegime.ZERO:
        b0 = base.left.beta
        profile = Profile1D.build('affine', 0.0, 1.0, b0, length, reflected)
        logger.debug(f"Zero eigenvalue for {problem}")
        return EigenEstimate(0.0, 0.0, EigenMethod.CLOSED_FORM, profile, domain,
                             details={'case': tag.name, 'regime': regime.name})

    if not base.right.is_dirichlet and base.left.beta != 0.0 and base.right.beta == -base.left.beta:
        b0 = base.left.beta
        s = abs(b0)
        c0, c1 = (1.0, 0.0) if b0 > 0 else (0.0, 1.0)
        profile = Profile1D.build('hyp', s, c0, c1, length, reflected)
        return EigenEstimate(-b0 * b0, 0.0, EigenMethod.CLOSED_FORM, profile, domain,
                             details={'case': tag.name, 'regime': SignRegime.NEGATIVE.name})

    equation = characteristic(problem, regime)
    s = first_root(equation, tol)
    b0 = base.left.beta
    if regime is SignRegime.POSITIVE:
        value = s * s
        profile = Profile1D.build('trig', s, 1.0, b0 / s, length, reflected)
    else:
        value = -s * s
        if not base.right.is_dirichlet and base.right.beta == b0:
            c0 = c1 = 1.0
        else:
            c0 = 0.5 * (1.0 + b0 / s)
            c1 = 0.5 * (1.0 - b0 / s) * math.exp(-s * length)
        profile = Profile1D.build('hyp', s, c0, c1, length, reflected)

    root_error = tol.root_abs_tol + 4.0 * np.finfo(float).eps * s
    residual = 2.0 * s * root_error / max(1.0, s * s)
    if residual > tol.eig_rel_tol:
        raise MaxIterations(
            f"Root tolerance {tol.root_abs_tol:g} cannot deliver eig_rel_tol {tol.eig_rel_tol:g} at s={s:.6g}"
        )
    logger.debug(f"{problem}: s*={s:.12g}, sigma={value:.12g}, {equation.bracket_hint}")
    return EigenEstimate(value, residual, EigenMethod.TRANSCENDENTAL_ROOT, profile, domain,
                         details={'case': tag.name, 'regime': regime.name, 'root': s})


def _regime_of(value):
    if value > 0:
        return SignRegime.POSITIVE
    return SignRegime.ZERO if value == 0 else SignRegime.NEGATIVE


def _dirichlet_neumann_pair(problem):
    length = problem.length
    left, right = problem.left, problem.right
    if left.is_dirichlet and right.is_dirichlet:
        s = math.pi / length
        return s * s, Profile1D.build('trig', s, 0.0, 1.0, length)
    if left.is_dirichlet:
        s = 0.5 * math.pi / length
        return s * s, Profile1D.build('trig', s, 0.0, 1.0, length)
    if right.is_dirichlet:
        s = 0.5 * math.pi / length
        return s * s, Profile1D.build('trig', s, 1.0, 0.0, length)
    return 0.0, Profile1D.build('affine', 0.0, 1.0, 0.0, length)


def eigenfunction_1d(estimate, x):
    """
    Evaluate a one-dimensional principal eigenfunction

    Args:
        estimate: EigenEstimate with a domain
        x: Point in [0, L]

    Returns:
        float: psi_1(x), positive inside the interval

    Raises:
        OutOfDomain: If x lies outside the estimate's interval
    """
    if estimate.domain is None:
        raise OutOfDomain("Estimate carries no interval domain")
    lo, hi = estimate.domain
    slack = 1e-12 * max(1.0, hi - lo)
    if not (lo - slack <= x <= hi + slack):
        raise OutOfDomain(f"x={x} outside [{lo:g}, {hi:g}]")
    return float(estimate.eigenfunction(min(max(x, lo), hi)))


def limiting_behavior(left, right):
    """
    Limit of sigma_1 as L shrinks to 0 for an endpoint pairing

    Returns:
        float: +inf, -inf, or the L-independent value -beta_0**2
    """
    if left.is_dirichlet or right.is_dirichlet:
        return math.inf
    total = left.beta + right.beta
    if total > 0:
        return math.inf
    if total < 0:
        return -math.inf
    return -left.beta * left.beta


def small_length_rate(left, right):
    """
    Leading behaviour sigma_1 ~ coefficient * L**exponent as L shrinks to 0

    Returns:
        LimitRate
    """
    if left.is_dirichlet and right.is_dirichlet:
        return LimitRate(-2.0, math.pi ** 2)
    if left.is_dirichlet or right.is_dirichlet:
        return LimitRate(-2.0, math.pi ** 2 / 4.0)
    total = left.beta + right.beta
    if total != 0:
        return LimitRate(-1.0, total)
    return LimitRate(0.0, -left.beta * left.beta)


def dirichlet_value(length):
    """(pi/L)**2, the ceiling for every other pairing on (0, L)"""
    return (math.pi / length) ** 2
