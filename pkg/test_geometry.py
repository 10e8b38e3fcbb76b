"""
Tests for exact and mesh-based geometric quantities
"""
import math

import pytest

from utils.core_types import DegenerateGeometry, InvalidDimension
from utils.geometry_utils import (
    GeometrySource,
    annulus_geometry,
    ball_geometry,
    boundary_ratio,
    isoperimetric_check,
    isoperimetric_ratio_bound,
    mesh_geometry,
    monte_carlo_ball_volume,
    omega_n,
    rectangle_geometry,
    robin_upper_bound,
)
from utils.mesh_utils import mesh_annulus, mesh_disk, mesh_rectangle


def test_omega_values():
    assert omega_n(1) == 2.0
    assert omega_n(2) == pytest.approx(math.pi, rel=1e-15)
    assert omega_n(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-15)
    assert omega_n(4) == pytest.approx(math.pi ** 2 / 2.0, rel=1e-15)
    with pytest.raises(InvalidDimension):
        omega_n(0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_balls_are_isoperimetric_equality(n):
    geometry = ball_geometry(n, 1.0)
    assert abs(isoperimetric_check(geometry)) <= 1e-12
    assert boundary_ratio(geometry) == pytest.approx(n)


def test_square_margin():
    assert isoperimetric_check(rectangle_geometry(1.0, 1.0)) == pytest.approx(4.0 - 2.0 * math.sqrt(math.pi),
                                                                             rel=1e-12)
    assert isoperimetric_check(annulus_geometry(0.5, 1.0)) > 0


def test_ratio_scales_inversely():
    geometry = rectangle_geometry(1.0, 2.0)
    for t in (0.5, 0.1, 0.01):
        assert geometry.shrunk(t).ratio == pytest.approx(geometry.ratio / t, rel=1e-12)


def test_isoperimetric_ratio_bound():
    measure = 2.0
    bound = isoperimetric_ratio_bound(2, measure)
    disk = ball_geometry(2, math.sqrt(measure / math.pi))
    assert disk.ratio == pytest.approx(bound, rel=1e-12)
    assert rectangle_geometry(1.0, 2.0).ratio > bound


def test_robin_upper_bound():
    assert robin_upper_bound(rectangle_geometry(0.5, 0.5), -1.0) == pytest.approx(-8.0)


def test_mesh_geometry():
    square = mesh_geometry(mesh_rectangle(1.0, 1.0, 16))
    assert square.source is GeometrySource.MESH
    assert square.measure == pytest.approx(1.0, rel=1e-12)
    disk = mesh_geometry(mesh_disk(1.0, 64))
    assert abs(isoperimetric_check(disk)) <= 5e-3
    annulus = mesh_geometry(mesh_annulus(0.5, 1.0, 32))
    assert isoperimetric_check(annulus) > 0


def test_degenerate_geometry():
    with pytest.raises(DegenerateGeometry):
        ball_geometry(2, 0.0)
    with pytest.raises(DegenerateGeometry):
        rectangle_geometry(-1.0, 1.0)
    with pytest.raises(DegenerateGeometry):
        annulus_geometry(1.0, 1.0)
    with pytest.raises(DegenerateGeometry):
        rectangle_geometry(1.0, 1.0).shrunk(0.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_monte_carlo_volume(n):
    estimate, error = monte_carlo_ball_volume(n, 100_000, seed=n)
    assert error >= 0
    assert abs(estimate - omega_n(n)) <= 4.0 * error + 1e-12
    again, _ = monte_carlo_ball_volume(n, 100_000, seed=n)
    assert again == estimate
