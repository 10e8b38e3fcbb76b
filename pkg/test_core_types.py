"""
Tests for boundary operators, problems, estimates and tolerance policies
"""
import math

import numpy as np
import pytest

from utils.core_types import (
    BoundaryKind,
    BoundaryOperator,
    ConfigError,
    EigenEstimate,
    EigenMethod,
    NonFiniteValue,
    NonPositiveLength,
    OutOfDomain,
    Problem1D,
    RadialWithoutNeumannCore,
    RobinSpectraError,
    TolerancePolicy,
    validate,
)

D = BoundaryOperator.dirichlet()
N = BoundaryOperator.neumann()
R = BoundaryOperator.robin


def test_robin_zero_is_neumann():
    assert R(0.0) == N
    assert R(-0.0) == N
    assert hash(R(0.0)) == hash(N)
    assert R(0.0).kind is BoundaryKind.NEUMANN


def test_parse_tags():
    test_cases = [
        (('D',), D),
        (('n',), N),
        (('R', '2.5'), R(2.5)),
        (('r', -1), R(-1.0)),
        (('R', 0), N),
    ]
    for args, expected in test_cases:
        assert BoundaryOperator.parse(*args) == expected


@pytest.mark.parametrize("args", [('R',), ('X',), ('R', 'abc')])
def test_parse_rejects_bad_input(args):
    with pytest.raises(ConfigError):
        BoundaryOperator.parse(*args)


def test_non_finite_coefficient_rejected():
    with pytest.raises(NonFiniteValue):
        R(math.nan)
    with pytest.raises(NonFiniteValue):
        R(math.inf)


def test_dirichlet_is_top_of_order():
    assert D.effective_beta == math.inf
    assert R(1e300).effective_beta < D.effective_beta
    with pytest.raises(RobinSpectraError):
        D.coefficient


def test_operator_strings():
    assert str(D) == 'D'
    assert str(N) == 'N'
    assert str(R(1.5)) == 'R(1.5)'


def test_errors_are_value_errors():
    assert issubclass(RobinSpectraError, ValueError)
    assert issubclass(NonPositiveLength, ValueError)


def test_swapped_and_rescaled():
    problem = Problem1D(2.0, R(1.0), D)
    assert problem.swapped() == Problem1D(2.0, D, R(1.0))
    scaled = Problem1D(1.0, R(2.0), N).rescaled(4.0)
    assert scaled.length == 4.0
    assert scaled.left == R(0.5)
    assert scaled.right == N


def test_validate():
    assert validate(Problem1D(1.0, D, D)).length == 1.0
    with pytest.raises(NonPositiveLength):
        validate(Problem1D(0.0, D, D))
    with pytest.raises(NonPositiveLength):
        validate(Problem1D(math.nan, D, D))
    with pytest.raises(RadialWithoutNeumannCore):
        validate(Problem1D(1.0, D, D, radial_dimension=2))
    assert validate(Problem1D(1.0, N, R(1.0), radial_dimension=3)).radial_dimension == 3


def test_estimate_validation_and_sampling():
    with pytest.raises(NonFiniteValue):
        EigenEstimate(math.nan, 0.0, EigenMethod.CLOSED_FORM, lambda x: x)
    with pytest.raises(NonFiniteValue):
        EigenEstimate(1.0, -1.0, EigenMethod.CLOSED_FORM, lambda x: x)

    estimate = EigenEstimate(1.0, 0.0, EigenMethod.CLOSED_FORM, lambda x: 2.0 * x, (0.0, 1.0))
    np.testing.assert_allclose(estimate.sample([0.0, 0.5, 1.0]), [0.0, 1.0, 2.0])
    with pytest.raises(OutOfDomain):
        estimate.sample([1.5])


def test_tolerance_policy():
    policy = TolerancePolicy()
    assert policy.root_abs_tol == 1e-12
    widened = policy.with_overrides(eig_rel_tol=1e-2)
    assert widened.eig_rel_tol == 1e-2
    assert widened.root_abs_tol == policy.root_abs_tol
    assert TolerancePolicy.for_discretization().eig_rel_tol >= TolerancePolicy.from_config().eig_rel_tol
    with pytest.raises(ConfigError):
        TolerancePolicy(eig_rel_tol=0.0)
    with pytest.raises(ConfigError):
        TolerancePolicy(max_iterations=0)
