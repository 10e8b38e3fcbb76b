"""
Tests for the tridiagonal finite-difference oracle
"""
import math

import numpy as np
import pytest

from utils.core_types import BoundaryOperator, EigenMethod, InvalidMesh, Problem1D, TooCoarse
from utils.exact1d_utils import principal_eigenvalue_1d
from utils.fit_utils import convergence_order
from utils.tridiag_utils import Tridiag, assemble_1d, principal_eigenvalue_tridiag, smallest_eig_tridiag

D = BoundaryOperator.dirichlet()
N = BoundaryOperator.neumann()
R = BoundaryOperator.robin


def test_dirichlet_dirichlet():
    estimate = principal_eigenvalue_tridiag(Problem1D(1.0, D, D), 512)
    assert estimate.method is EigenMethod.TRIDIAGONAL
    assert estimate.value == pytest.approx(math.pi ** 2, rel=1e-4)


def test_neumann_neumann_is_zero():
    estimate = principal_eigenvalue_tridiag(Problem1D(2.0, N, N), 64)
    assert abs(estimate.value) <= 1e-10
    np.testing.assert_allclose(estimate.sample(np.linspace(0.0, 2.0, 9)), 1.0, atol=1e-8)


def test_second_order_convergence():
    pairs = []
    for n in (64, 128, 256, 512):
        pairs.append((1.0 / n, principal_eigenvalue_tridiag(Problem1D(1.0, D, D), n).value))
    assert convergence_order(pairs) == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("length,left,right", [
    (1.0, R(1.0), R(2.0)),
    (2.0, R(-1.0), N),
    (0.5, R(-3.0), R(-3.0)),
    (1.0, D, R(1.0)),
    (3.0, R(2.0), D),
    (1.0, R(3.0), R(-3.0)),
])
def test_matches_exact_solver(length, left, right):
    problem = Problem1D(length, left, right)
    exact = principal_eigenvalue_1d(problem).value
    discrete = principal_eigenvalue_tridiag(problem, 2048).value
    assert discrete == pytest.approx(exact, abs=5e-4 * (1 + abs(exact)))


def test_radial_weighting():
    estimate = principal_eigenvalue_tridiag(Problem1D(1.0, N, D, radial_dimension=2), 2048)
    assert estimate.value == pytest.approx(5.783185962946784, abs=1e-3)
    sphere = principal_eigenvalue_tridiag(Problem1D(1.0, N, D, radial_dimension=3), 2048)
    assert sphere.value == pytest.approx(math.pi ** 2, abs=1e-3)


def test_eigenfunction_vanishes_at_dirichlet_ends():
    estimate = principal_eigenvalue_tridiag(Problem1D(1.0, D, R(1.0)), 256)
    x = np.linspace(0.0, 1.0, 33)
    values = estimate.sample(x)
    assert values[0] == 0.0
    assert np.all(values[1:] > 0)
    assert np.max(values) <= 1.0


def test_assembly_shapes():
    pencil = assemble_1d(Problem1D(1.0, D, N), 32)
    assert pencil.n == 32
    assert pencil.dirichlet_left and not pencil.dirichlet_right
    assert np.all(pencil.mass_diag > 0)
    assert np.sum(pencil.mass_diag) == pytest.approx(1.0 - 0.5 / 32)
    with pytest.raises(TooCoarse):
        assemble_1d(Problem1D(1.0, D, D), 8)


def test_bare_pencil():
    pencil = Tridiag(np.array([2.0, 2.0, 2.0]), np.array([-1.0, -1.0]), np.ones(3))
    estimate = smallest_eig_tridiag(pencil)
    assert estimate.value == pytest.approx(2.0 - math.sqrt(2.0), rel=1e-12)
    assert estimate.domain is None
    with pytest.raises(InvalidMesh):
        Tridiag(np.ones(3), np.ones(3), np.ones(3))
    with pytest.raises(InvalidMesh):
        Tridiag(np.ones(2), np.ones(1), np.array([1.0, 0.0]))
