"""
Tests for the structured mesh builders and mesh validation
"""
import math
from dataclasses import replace

import numpy as np
import pytest

from utils.core_types import BoundaryOperator, DegenerateGeometry, InvalidMesh
from utils.mesh_utils import (
    DomainKind,
    boundary_lengths,
    boundary_loops,
    mesh_annulus,
    mesh_disk,
    mesh_rectangle,
    orient_triangles,
    triangle_areas,
    validate_mesh,
    with_boundary,
)

D = BoundaryOperator.dirichlet()
N = BoundaryOperator.neumann()
R = BoundaryOperator.robin


def test_unit_square():
    mesh = mesh_rectangle(1.0, 1.0, 64)
    assert mesh.n_vertices == 65 ** 2
    assert mesh.n_triangles == 2 * 64 ** 2
    assert mesh.domain_tag.kind is DomainKind.RECTANGLE
    assert np.sum(triangle_areas(mesh)) == pytest.approx(1.0, rel=1e-12)
    assert np.sum(boundary_lengths(mesh)) == pytest.approx(4.0, rel=1e-12)
    assert all(tag == N for tag in mesh.boundary_tags)
    assert len(boundary_loops(mesh)) == 1


def test_rectangle_aspect():
    mesh = mesh_rectangle(2.0, 1.0, 16, D)
    assert mesh.n_vertices == 17 * 9
    assert np.sum(triangle_areas(mesh)) == pytest.approx(2.0, rel=1e-12)
    assert all(tag == D for tag in mesh.boundary_tags)


def test_disk():
    mesh = mesh_disk(1.0, 64, R(1.0))
    assert np.sum(triangle_areas(mesh)) == pytest.approx(math.pi, rel=1e-3)
    radii = np.hypot(*mesh.vertices[np.unique(mesh.boundary_edges)].T)
    np.testing.assert_allclose(radii, 1.0, rtol=1e-12)
    assert np.all(triangle_areas(mesh) > 0)
    fine = mesh_disk(1.0, 128)
    assert np.sum(boundary_lengths(fine)) == pytest.approx(2 * math.pi, rel=5e-4)


def test_annulus_has_two_loops():
    mesh = mesh_annulus(0.5, 1.0, 64)
    loops = boundary_loops(mesh)
    assert len(loops) == 2
    assert np.sum(triangle_areas(mesh)) == pytest.approx(0.75 * math.pi, rel=5e-3)
    sizes = sorted(np.hypot(*mesh.vertices[loop].T).mean() for loop in loops)
    assert sizes == pytest.approx([0.5, 1.0], rel=1e-12)


@pytest.mark.parametrize("builder,args", [
    (mesh_rectangle, (0.0, 1.0, 16)),
    (mesh_rectangle, (1.0, 1.0, 4)),
    (mesh_disk, (-1.0, 16)),
    (mesh_annulus, (1.0, 0.5, 16)),
])
def test_degenerate_builders(builder, args):
    with pytest.raises(DegenerateGeometry):
        builder(*args)


def test_orientation_fix():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    clockwise = np.array([[0, 2, 1]])
    fixed = orient_triangles(vertices, clockwise)
    assert sorted(fixed[0]) == [0, 1, 2]
    assert fixed[0, 0] == 0 and fixed[0, 1] == 1 and fixed[0, 2] == 2


def test_validation_errors():
    mesh = mesh_rectangle(1.0, 1.0, 8)
    with pytest.raises(InvalidMesh):
        validate_mesh(replace(mesh, boundary_edges=mesh.boundary_edges[1:], boundary_tags=mesh.boundary_tags[1:]))
    with pytest.raises(InvalidMesh):
        validate_mesh(replace(mesh, boundary_tags=mesh.boundary_tags[1:]))
    flipped = mesh.triangles.copy()
    flipped[0, 1], flipped[0, 2] = flipped[0, 2], flipped[0, 1]
    with pytest.raises(InvalidMesh):
        validate_mesh(replace(mesh, triangles=flipped))
    bad = mesh.triangles.copy()
    bad[0, 0] = mesh.n_vertices
    with pytest.raises(InvalidMesh):
        validate_mesh(replace(mesh, triangles=bad))


def test_with_boundary():
    mesh = mesh_disk(1.0, 16)
    dirichlet = with_boundary(mesh, D)
    assert all(tag == D for tag in dirichlet.boundary_tags)
    assert dirichlet.vertices is mesh.vertices
    varying = with_boundary(mesh, lambda x, y: 1.0 + x)
    betas = np.array([tag.beta for tag in varying.boundary_tags])
    assert betas.min() < 0.1 and betas.max() > 1.9
