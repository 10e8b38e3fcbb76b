"""
Tests for the radial shooting solver and the scaled ball eigenvalue
"""
import math

import numpy as np
import pytest

from utils.core_types import (
    BoundaryOperator,
    EigenMethod,
    InvalidDimension,
    NonPositiveLength,
    Problem1D,
    SolverFailure,
    TolerancePolicy,
)
from utils.exact1d_utils import principal_eigenvalue_1d
from utils.radial_utils import (
    BallProblem,
    asymptotic_slope,
    expansion_coefficients,
    principal_eigenvalue_ball,
    radial_profile,
    shoot,
    sigma_dot_formula,
    sigma_scaled,
)

D = BoundaryOperator.dirichlet()
N = BoundaryOperator.neumann()
R = BoundaryOperator.robin

STEPS = 1024
BESSEL_J0_FIRST_ZERO_SQUARED = 5.783185962946784


def ball(dimension, radius, boundary):
    return principal_eigenvalue_ball(BallProblem(dimension, radius, boundary), None, STEPS)


def test_dirichlet_balls():
    assert ball(1, 1.0, D).value == pytest.approx(math.pi ** 2 / 4, rel=1e-7)
    assert ball(2, 1.0, D).value == pytest.approx(BESSEL_J0_FIRST_ZERO_SQUARED, rel=1e-7)
    assert ball(3, 1.0, D).value == pytest.approx(math.pi ** 2, rel=1e-7)
    assert ball(3, 2.0, D).value == pytest.approx(math.pi ** 2 / 4, rel=1e-7)


def test_neumann_ball_is_zero():
    assert abs(ball(2, 1.0, N).value) <= 1e-12


@pytest.mark.parametrize("beta", [-1.0, 0.5, 2.0])
def test_one_dimensional_ball_matches_interval(beta):
    exact = principal_eigenvalue_1d(Problem1D(0.7, N, R(beta))).value
    assert ball(1, 0.7, R(beta)).value == pytest.approx(exact, rel=1e-8, abs=1e-8)


def test_estimate_fields():
    estimate = ball(2, 1.0, R(1.0))
    assert estimate.method is EigenMethod.SHOOTING
    assert estimate.domain == (0.0, 1.0)
    assert estimate.residual <= 1e-6
    r, xi = radial_profile(estimate)
    assert r[0] == 0.0 and r[-1] == pytest.approx(1.0)
    assert np.max(xi) == pytest.approx(1.0)
    assert np.all(xi > 0)
    assert np.all(np.diff(xi) < 0)


def test_negative_robin_profile_increases():
    estimate = ball(3, 1.0, R(-1.0))
    assert estimate.value < 0
    values = estimate.sample(np.linspace(0.0, 1.0, 50))
    assert np.all(values > 0)
    assert np.all(np.diff(values) > 0)


def test_ball_exceeds_interval():
    for dimension in (2, 3):
        for radius, beta in ((0.5, 1.0), (2.0, 0.3)):
            interval = principal_eigenvalue_1d(Problem1D(radius, N, R(beta))).value
            assert ball(dimension, radius, R(beta)).value > interval


def test_monotone_in_beta():
    ladder = [R(-1.0), R(-0.5), N, R(0.5), R(1.0), D]
    values = [ball(2, 1.0, op).value for op in ladder]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("radius", [0.01, 0.05, 0.5, 10.0])
def test_scaling(radius):
    problem = BallProblem(2, radius, R(1.0))
    direct = radius ** 2 * principal_eigenvalue_ball(problem, None, STEPS, rescale=False).value
    assert direct == pytest.approx(sigma_scaled(2, radius, 1.0, None, STEPS), rel=1e-8)


def test_scaled_eigenvalue_near_zero():
    assert abs(sigma_scaled(2, 0.0, 1.0, None, STEPS)) <= 1e-12
    assert sigma_scaled(2, -0.1, 1.0, None, STEPS) < 0
    small = sigma_scaled(2, 1e-3, 1.0, None, STEPS)
    assert small / 1e-3 == pytest.approx(asymptotic_slope(2, 1.0), rel=1e-2)


def test_asymptotic_slope():
    assert asymptotic_slope(1, 1.0) == pytest.approx(1.0)
    assert asymptotic_slope(2, 3.0) == pytest.approx(6.0)
    assert asymptotic_slope(3, 1.0) == pytest.approx(3.0)
    assert asymptotic_slope(2, -1.0) == pytest.approx(-2.0)


def test_expansion_coefficients():
    radii = [1e-2 * 2.0 ** -k for k in range(5)]
    c0, c1, _ = expansion_coefficients(2, 1.0, radii, None, STEPS)
    assert abs(c0) <= 1e-6
    assert c1 == pytest.approx(2.0, rel=5e-3)


@pytest.mark.parametrize("radius", [0.0, 0.5])
def test_derivative_formula_matches_difference(radius):
    h = 1e-4
    formula = sigma_dot_formula(2, radius, 1.0, None, STEPS)
    difference = (sigma_scaled(2, radius + h, 1.0, None, STEPS)
                  - sigma_scaled(2, radius - h, 1.0, None, STEPS)) / (2 * h)
    assert formula == pytest.approx(difference, abs=1e-3 * (1 + abs(formula)))


def test_shoot_trace():
    trace = shoot(BallProblem(2, 1.0, D), BESSEL_J0_FIRST_ZERO_SQUARED, STEPS)
    assert trace.r[-1] == pytest.approx(1.0)
    assert abs(trace.boundary_defect) <= 1e-6
    assert not trace.overflowed
    with pytest.raises(SolverFailure):
        shoot(BallProblem(2, 1.0, D), 1.0, steps=8)


def test_invalid_balls():
    with pytest.raises(InvalidDimension):
        BallProblem(0, 1.0, D)
    with pytest.raises(InvalidDimension):
        BallProblem(2.5, 1.0, D)
    with pytest.raises(NonPositiveLength):
        BallProblem(2, 0.0, D)


def test_small_ball_detour_matches_direct_shooting():
    problem = BallProblem(3, 0.02, R(-2.0))
    detour = principal_eigenvalue_ball(problem, None, STEPS)
    direct = principal_eigenvalue_ball(problem, None, STEPS, rescale=False)
    assert detour.details['scaled']
    assert 'scaled' not in direct.details
    assert detour.value == pytest.approx(direct.value, rel=1e-8)


def test_large_negative_robin_ball_stays_finite():
    tol = TolerancePolicy(1e-12, 1e-3, 200)
    estimate = principal_eigenvalue_ball(BallProblem(2, 300.0, R(-3.0)), tol, 4096)
    assert -9.1 < estimate.value < -9.0
    trace = estimate.details['trace']
    assert trace.log_scale > 0
    assert np.all(np.isfinite(trace.xi))
    r, xi = radial_profile(estimate)
    assert xi[-1] == pytest.approx(1.0)
    assert np.all(xi >= 0)


def test_renormalized_defect_keeps_its_sign():
    problem = BallProblem(2, 100.0, R(-3.0))
    below, above = shoot(problem, -12.0, 2048), shoot(problem, -6.0, 2048)
    assert not below.overflowed and not above.overflowed
    assert below.log_scale > 0
    assert below.boundary_defect > 0 > above.boundary_defect
    assert below.defect_at_scale(below.log_scale) == below.boundary_defect


@pytest.mark.parametrize("dimension", [1, 3])
@pytest.mark.parametrize("radius", [0.0, 0.5])
def test_derivative_formula_in_other_dimensions(dimension, radius):
    h = 1e-4
    formula = sigma_dot_formula(dimension, radius, 1.0, None, STEPS)
    difference = (sigma_scaled(dimension, radius + h, 1.0, None, STEPS)
                  - sigma_scaled(dimension, radius - h, 1.0, None, STEPS)) / (2 * h)
    assert formula == pytest.approx(difference, abs=1e-3 * (1 + abs(formula)))
    if radius == 0.0:
        assert formula == pytest.approx(asymptotic_slope(dimension, 1.0), rel=1e-3)


@pytest.mark.parametrize("dimension,beta", [(2, 3.0), (3, 1.0)])
def test_small_radius_slope(dimension, beta):
    slope = asymptotic_slope(dimension, beta)
    small = sigma_scaled(dimension, 1e-3, beta, None, STEPS)
    assert small / 1e-3 == pytest.approx(slope, rel=1e-2)
