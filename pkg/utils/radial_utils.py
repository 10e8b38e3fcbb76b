"""
Principal eigenvalue of the ball B_R in R^N with a constant Robin or Dirichlet
boundary, by shooting on the radial equation

    -xi'' - (N-1)/r xi' = sigma xi,   xi'(0) = 0,   xi'(R) + beta xi(R) = 0

plus the scaled eigenvalue Sigma(R) = R**2 sigma_1(B_R) of the unit ball with
coefficient beta*R, its derivative formula and the small-R slope.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from config.config import Config
from utils.core_types import (
    BoundaryOperator,
    BracketFailure,
    EigenEstimate,
    EigenMethod,
    InvalidDimension,
    MaxIterations,
    NonPositiveLength,
    ShootingOverflow,
    SolverFailure,
    TolerancePolicy,
)
from utils.geometry_utils import ball_geometry

logger = logging.getLogger(__name__)

SEED_OFFSET = 1e-6
OVERFLOW_LIMIT = 1e300
RENORM_LIMIT = 1e100
MIN_STEPS = 64
SCALED_BELOW = 0.1
MAX_BRACKET_GROWTH = 60


@dataclass(frozen=True)
class BallProblem:
    dimension: int
    radius: float
    boundary: BoundaryOperator

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InvalidDimension(f"Ball dimension must be a positive integer, got {self.dimension}")
        if not math.isfinite(self.radius) or self.radius <= 0:
            raise NonPositiveLength(f"Ball radius must be positive, got {self.radius}")

    def unit(self):
        """The same problem rescaled to the unit ball"""
        boundary = self.boundary
        if not boundary.is_dirichlet and boundary.beta != 0.0:
            boundary = BoundaryOperator.robin(boundary.beta * self.radius)
        return BallProblem(self.dimension, 1.0, boundary)


@dataclass(frozen=True)
class ShootingTrace:
    """
    RK4 trace of the radial equation. Samples are expressed in the scale of
    the last step; the true solution is exp(log_scale) times the stored one.
    """
    sigma: float
    r: np.ndarray
    xi: np.ndarray
    dxi: np.ndarray
    boundary_defect: float
    overflowed: bool = False
    log_scale: float = 0.0

    @property
    def samples(self):
        return list(zip(self.r, self.xi, self.dxi))

    def defect_at_scale(self, log_scale):
        """Boundary defect of the unnormalized solution divided by exp(log_scale)"""
        return self.boundary_defect * math.exp(self.log_scale - log_scale)

    @property
    def normalized_defect(self):
        """Boundary defect over the size of the final state; continuous in sigma"""
        size = math.hypot(self.xi[-1], self.dxi[-1])
        return self.boundary_defect / size if size > 0 else self.boundary_defect


def _defect(boundary, xi, dxi):
    if boundary.is_dirichlet:
        return xi
    return dxi + boundary.beta * xi


def shoot(problem, sigma, steps=None):
    """
    Integrate the radial equation from the centre for a trial sigma

    The state is renormalized whenever it grows past RENORM_LIMIT, so strongly
    negative sigma on large balls stays finite.

    Args:
        problem: BallProblem
        sigma: Trial eigenvalue
        steps: Number of fixed RK4 steps (>= 64)

    Returns:
        ShootingTrace ending at r = R with the boundary defect
    """
    steps = steps or Config.SHOOTING_STEPS
    if steps < MIN_STEPS:
        raise SolverFailure(f"Shooting needs at least {MIN_STEPS} steps, got {steps}")
    n = problem.dimension
    radius = problem.radius
    boundary = problem.boundary
    bend = float(n - 1)

    eps = radius * SEED_OFFSET
    xi = 1.0 - sigma * eps ** 2 / (2 * n) + sigma ** 2 * eps ** 4 / (8 * n * (n + 2))
    eta = -sigma * eps / n + sigma ** 2 * eps ** 3 / (2 * n * (n + 2))

    def slope(r, x, y):
        return y, -bend * y / r - sigma * x

    h = (radius - eps) / steps
    rs = [eps]
    xis = [xi]
    etas = [eta]
    scales = [0.0]
    log_scale = 0.0
    last_defect = _defect(boundary, xi, eta)
    overflowed = False
    r = eps
    for k in range(steps):
        k1x, k1y = slope(r, xi, eta)
        k2x, k2y = slope(r + 0.5 * h, xi + 0.5 * h * k1x, eta + 0.5 * h * k1y)
        k3x, k3y = slope(r + 0.5 * h, xi + 0.5 * h * k2x, eta + 0.5 * h * k2y)
        k4x, k4y = slope(r + h, xi + h * k3x, eta + h * k3y)
        xi_next = xi + h * (k1x + 2 * k2x + 2 * k3x + k4x) / 6.0
        eta_next = eta + h * (k1y + 2 * k2y + 2 * k3y + k4y) / 6.0
        if not (abs(xi_next) < OVERFLOW_LIMIT and abs(eta_next) < OVERFLOW_LIMIT):
            overflowed = True
            break
        xi, eta = xi_next, eta_next
        size = max(abs(xi), abs(eta))
        if size > RENORM_LIMIT:
            xi, eta = xi / size, eta / size
            log_scale += math.log(size)
        r = eps + (k + 1) * h
        rs.append(r)
        xis.append(xi)
        etas.append(eta)
        scales.append(log_scale)
        last_defect = _defect(boundary, xi, eta)

    if overflowed:
        logger.debug(f"Shooting overflow at r={r:.6g} for sigma={sigma:.6g}; using last defect sign")
    # earlier samples in the scale of the last one; far-back samples underflow to 0
    factor = np.exp(np.asarray(scales) - log_scale)
    return ShootingTrace(sigma, np.asarray(rs), np.asarray(xis) * factor, np.asarray(etas) * factor,
                         float(last_defect), overflowed, log_scale)


@dataclass(frozen=True)
class RadialProfile:
    """Max-normalized piecewise-linear interpolant of a shooting trace"""
    r: np.ndarray
    xi: np.ndarray

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.r, self.xi)


def _profile(trace, radius_factor=1.0):
    r = np.concatenate(([0.0], trace.r)) * radius_factor
    xi = np.concatenate((trace.xi[:1], trace.xi))
    return RadialProfile(r, xi / np.max(np.abs(xi)))


def _bracket_and_refine(problem, tol, steps):
    """Bracket and refine sigma; the defect sign at sigma = 0 is known from beta"""
    boundary = problem.boundary
    defect = lambda sigma, m=steps: shoot(problem, sigma, m).normalized_defect

    if not boundary.is_dirichlet and boundary.beta == 0.0:
        return 0.0, 0

    if boundary.is_dirichlet or boundary.beta > 0:
        lo, hi = _scan_upward(problem, steps, tol)
    else:
        lo, hi = _grow_downward(problem, steps, tol)

    f_lo, f_hi = defect(lo), defect(hi)
    if f_lo == 0:
        return lo, 0
    if f_hi == 0:
        return hi, 0
    if f_lo * f_hi > 0:
        raise BracketFailure(f"Defect keeps its sign on [{lo:.6g}, {hi:.6g}] for {problem}")
    xtol = tol.root_abs_tol * max(1.0, abs(hi - lo))
    try:
        sigma, info = brentq(defect, lo, hi, xtol=xtol, maxiter=tol.max_iterations,
                             full_output=True, disp=False)
    except RuntimeError as e:
        raise MaxIterations(f"Shooting refinement failed for {problem}: {e}") from e
    if not info.converged:
        raise MaxIterations(f"Shooting refinement stopped after {info.iterations} iterations for {problem}")
    return float(sigma), info.iterations


def _scan_upward(problem, steps, tol):
    """[0, hi] with a negative defect at hi; the step stays below the first gap"""
    radius = problem.radius
    step = math.pi ** 2 / (16.0 * radius ** 2)
    coarse = max(MIN_STEPS, steps // 8)
    lo = 0.0
    for k in range(1, tol.max_iterations + 1):
        hi = k * step
        if shoot(problem, hi, coarse).boundary_defect < 0:
            fine_lo = shoot(problem, lo, steps).boundary_defect
            fine_hi = shoot(problem, hi, steps).boundary_defect
            if fine_lo > 0 > fine_hi:
                return lo, hi
            return max(0.0, lo - step), hi + step
        lo = hi
    raise BracketFailure(f"No sign change below sigma={lo:.6g} for {problem}")


def _grow_downward(problem, steps, tol):
    """[lo, 0] with lo pushed down geometrically until the defect turns positive"""
    beta = problem.boundary.beta
    radius = problem.radius
    lo = -4.0 * beta * beta * max(1.0, 4.0 / radius ** 2) - 1.0
    for _ in range(MAX_BRACKET_GROWTH):
        if shoot(problem, lo, steps).boundary_defect > 0:
            return lo, 0.0
        lo *= 4.0
    raise BracketFailure(f"Defect stayed negative down to sigma={lo:.6g} for {problem}")


def principal_eigenvalue_ball(problem, tol=None, steps=None, rescale=True):
    """
    Principal eigenvalue of the ball by shooting and bracketed refinement

    Small radii are solved on the unit ball with coefficient beta*R and mapped
    back by sigma = Sigma / R**2 unless rescale is False.

    Args:
        problem: BallProblem
        tol: TolerancePolicy (discretization defaults)
        steps: RK4 steps per shot
        rescale: Allow the unit-ball detour for radii below SCALED_BELOW

    Returns:
        EigenEstimate with a radial eigenfunction on [0, R]
    """
    tol = tol or TolerancePolicy.for_discretization()
    steps = steps or Config.SHOOTING_STEPS
    radius = problem.radius
    if rescale and radius < SCALED_BELOW:
        unit = problem.unit()
        estimate = principal_eigenvalue_ball(unit, tol, steps)
        value = estimate.value / radius ** 2
        profile = RadialProfile(estimate.eigenfunction.r * radius, estimate.eigenfunction.xi)
        return EigenEstimate(value, estimate.residual, EigenMethod.SHOOTING, profile,
                             (0.0, radius), estimate.iterations,
                             details=dict(estimate.details, scaled=True))

    sigma, iterations = _bracket_and_refine(problem, tol, steps)
    if sigma == 0.0:
        residual = 0.0
        trace = shoot(problem, sigma, 2 * steps)
    else:
        refined = _halved_step_correction(problem, sigma, 2 * steps)
        residual = abs(refined - sigma) / max(1.0, abs(refined))
        sigma = refined
        trace = shoot(problem, sigma, 2 * steps)
    if trace.overflowed:
        raise ShootingOverflow(f"Eigenfunction overflows before r=R at sigma={sigma:.6g} for {problem}")
    if residual > tol.eig_rel_tol:
        raise SolverFailure(
            f"Step halving moved sigma by {residual:.3g} (> {tol.eig_rel_tol:g}) for {problem}; raise steps"
        )
    logger.debug(f"Ball N={problem.dimension} R={radius:g} {problem.boundary}: sigma={sigma:.12g}")
    return EigenEstimate(sigma, residual, EigenMethod.SHOOTING, _profile(trace),
                         (0.0, radius), iterations, details={'steps': steps, 'trace': trace})


def _halved_step_correction(problem, sigma, steps):
    """One Newton step on the defect integrated with the halved step size"""
    delta = 1e-7 * max(1.0, abs(sigma))
    trace = shoot(problem, sigma, steps)
    centre = trace.boundary_defect
    upper = shoot(problem, sigma + delta, steps).defect_at_scale(trace.log_scale)
    lower = shoot(problem, sigma - delta, steps).defect_at_scale(trace.log_scale)
    slope = (upper - lower) / (2.0 * delta)
    if slope == 0 or not math.isfinite(slope):
        raise SolverFailure(f"Flat defect near sigma={sigma:.6g} for {problem}")
    return sigma - centre / slope


def _unit_problem(n, radius, beta):
    if n < 1:
        raise InvalidDimension(f"Ball dimension must be >= 1, got {n}")
    return BallProblem(n, 1.0, BoundaryOperator.robin(beta * radius))


def sigma_scaled(n, radius, beta, tol=None, steps=None):
    """
    Scaled eigenvalue Sigma(R) = R**2 sigma_1(B_R, beta)

    Computed on the unit ball with coefficient beta*R, so any real R is
    accepted (R <= 0 continues Sigma analytically).

    Returns:
        float
    """
    problem = _unit_problem(n, radius, beta)
    return principal_eigenvalue_ball(problem, tol, steps).value


def sigma_dot_formula(n, radius, beta, tol=None, steps=None):
    """
    d Sigma / dR as the boundary-to-volume integral ratio of the normalized
    eigenfunction: beta * xi(1)**2 / int_0^1 xi**2 r**(N-1) dr

    Returns:
        float
    """
    steps = steps or Config.SHOOTING_STEPS
    problem = _unit_problem(n, radius, beta)
    estimate = principal_eigenvalue_ball(problem, tol, steps)
    trace = estimate.details.get('trace') if estimate.value != 0.0 else None
    if trace is None:
        trace = shoot(problem, estimate.value, steps)
    r, xi = trace.r, trace.xi
    eps = r[0]
    volume = simpson(xi ** 2 * r ** (n - 1), x=r) + xi[0] ** 2 * eps ** n / n
    return beta * xi[-1] ** 2 / volume


def asymptotic_slope(n, beta):
    """
    Small-R slope of Sigma(R): beta * Area(dB_1) / |B_1| = beta * N

    The slope is established for beta > 0; negative beta gives the formal
    extension and is logged as such.
    """
    if n < 1:
        raise InvalidDimension(f"Ball dimension must be >= 1, got {n}")
    unit = ball_geometry(n, 1.0)
    slope = beta * unit.boundary_area / unit.measure
    if beta < 0:
        logger.warning(f"Slope {slope:g} for beta={beta:g} < 0 is a formal extension")
    return slope


def expansion_coefficients(n, beta, radii, tol=None, steps=None):
    """
    Quadratic least-squares fit Sigma(R) ~ c0 + c1 R + c2 R**2

    Returns:
        tuple: (c0, c1, c2)
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size < 3:
        raise SolverFailure("Quadratic expansion fit needs at least three radii")
    values = np.array([sigma_scaled(n, r, beta, tol, steps) for r in radii])
    c2, c1, c0 = np.polyfit(radii, values, 2)
    return float(c0), float(c1), float(c2)


def radial_profile(estimate):
    """(r, xi) samples of a shooting estimate's normalized eigenfunction"""
    profile = estimate.eigenfunction
    return np.asarray(profile.r), np.asarray(profile.xi)
