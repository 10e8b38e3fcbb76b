"""
Triangulated planar domains with tagged boundary edges: structured rectangles,
concentric-ring disks and annuli, validation and boundary re-tagging
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from enum import Enum
from typing import Tuple

import numpy as np

from utils.core_types import BoundaryOperator, DegenerateGeometry, InvalidMesh

logger = logging.getLogger(__name__)

MIN_RESOLUTION = 8


class DomainKind(Enum):
    RECTANGLE = 'Rectangle'
    DISK = 'Disk'
    ANNULUS = 'Annulus'
    IMPORTED = 'Imported'


@dataclass(frozen=True)
class DomainTag:
    kind: DomainKind
    params: Tuple[float, ...] = ()

    def __str__(self):
        if not self.params:
            return self.kind.value
        return f"{self.kind.value}({', '.join(f'{p:g}' for p in self.params)})"


@dataclass(frozen=True, eq=False)
class Mesh2D:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: Tuple[BoundaryOperator, ...]
    domain_tag: DomainTag = DomainTag(DomainKind.IMPORTED)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def __repr__(self):
        return (f"Mesh2D({self.domain_tag}, {self.n_vertices} vertices, "
                f"{self.n_triangles} triangles, {len(self.boundary_edges)} boundary edges)")


def _build(vertices, triangles, edges, boundary, tag):
    boundary = boundary or BoundaryOperator.neumann()
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    triangles = orient_triangles(vertices, triangles)
    return Mesh2D(vertices, triangles, edges, tuple([boundary] * len(edges)), tag)


def orient_triangles(vertices, triangles):
    """Swap two corners of every clockwise triangle"""
    signed = _signed_areas(vertices, triangles)
    flipped = signed < 0
    if np.any(flipped):
        triangles = triangles.copy()
        triangles[flipped, 1], triangles[flipped, 2] = triangles[flipped, 2], triangles[flipped, 1].copy()
    return triangles


def _signed_areas(vertices, triangles):
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    d1, d2 = p1 - p0, p2 - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def triangle_areas(mesh):
    return _signed_areas(mesh.vertices, mesh.triangles)


def boundary_lengths(mesh):
    p, q = mesh.vertices[mesh.boundary_edges[:, 0]], mesh.vertices[mesh.boundary_edges[:, 1]]
    return np.hypot(*(q - p).T)


def boundary_midpoints(mesh):
    p, q = mesh.vertices[mesh.boundary_edges[:, 0]], mesh.vertices[mesh.boundary_edges[:, 1]]
    return 0.5 * (p + q)


def boundary_loops(mesh):
    """
    Split the boundary edges into closed vertex loops

    Raises:
        InvalidMesh: If a boundary vertex does not have exactly two boundary edges
    """
    neighbours = defaultdict(list)
    for i, j in mesh.boundary_edges:
        neighbours[int(i)].append(int(j))
        neighbours[int(j)].append(int(i))
    bad = [v for v, adj in neighbours.items() if len(adj) != 2]
    if bad:
        raise InvalidMesh(f"Boundary is not a union of closed curves near vertex {bad[0]}")

    loops = []
    seen = set()
    for start in neighbours:
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        previous, current = start, neighbours[start][0]
        while current != start:
            if current in seen:
                raise InvalidMesh(f"Boundary curves touch at vertex {current}")
            loop.append(current)
            seen.add(current)
            a, b = neighbours[current]
            previous, current = current, (b if a == previous else a)
        loops.append(loop)
    return loops


def validate_mesh(mesh):
    """
    Check the Mesh2D invariants

    Returns:
        Mesh2D: The same mesh

    Raises:
        InvalidMesh: On shape, index, orientation or boundary-topology errors
    """
    vertices, triangles, edges = mesh.vertices, mesh.triangles, mesh.boundary_edges
    if vertices.ndim != 2 or vertices.shape[1] != 2 or len(vertices) < 3:
        raise InvalidMesh("Vertices must be an (n, 2) array with n >= 3")
    if not np.all(np.isfinite(vertices)):
        raise InvalidMesh("Vertex coordinates must be finite")
    if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
        raise InvalidMesh("Triangles must be a non-empty (m, 3) index array")
    if edges.ndim != 2 or edges.shape[1] != 2 or len(edges) == 0:
        raise InvalidMesh("Boundary edges must be a non-empty (k, 2) index array")
    if len(mesh.boundary_tags) != len(edges):
        raise InvalidMesh(f"{len(edges)} boundary edges but {len(mesh.boundary_tags)} tags")
    for name, index in (('triangle', triangles), ('boundary edge', edges)):
        if index.min() < 0 or index.max() >= len(vertices):
            raise InvalidMesh(f"A {name} refers to a vertex outside 0..{len(vertices) - 1}")

    areas = triangle_areas(mesh)
    if np.any(areas <= 0):
        raise InvalidMesh(f"Triangle {int(np.argmin(areas))} has non-positive area {areas.min():.3g}")

    counts = defaultdict(int)
    for a, b, c in triangles:
        for i, j in ((a, b), (b, c), (c, a)):
            counts[(min(i, j), max(i, j))] += 1
    if any(n > 2 for n in counts.values()):
        raise InvalidMesh("An edge is shared by more than two triangles")
    topological = {edge for edge, n in counts.items() if n == 1}
    tagged = [(min(int(i), int(j)), max(int(i), int(j))) for i, j in edges]
    if len(set(tagged)) != len(tagged):
        raise InvalidMesh("Duplicate boundary edge")
    missing = topological.difference(tagged)
    extra = set(tagged).difference(topological)
    if extra:
        raise InvalidMesh(f"Boundary edge {sorted(extra)[0]} does not belong to exactly one triangle")
    if missing:
        raise InvalidMesh(f"Edge {sorted(missing)[0]} lies on the boundary but carries no tag")

    boundary_loops(mesh)
    return mesh


def mesh_rectangle(a, b, resolution, boundary=None):
    """
    Structured grid on [0, a] x [0, b] with alternating cell diagonals

    Args:
        a, b: Side lengths
        resolution: Cells along the side of length a (>= 8)
        boundary: BoundaryOperator for every edge (Neumann by default)

    Returns:
        Mesh2D with (resolution + 1) * (ny + 1) vertices
    """
    if not (a > 0 and b > 0) or resolution < MIN_RESOLUTION:
        raise DegenerateGeometry(f"Rectangle needs positive sides and resolution >= {MIN_RESOLUTION}, "
                                 f"got {a} x {b} at {resolution}")
    nx = int(resolution)
    ny = max(2, int(round(resolution * b / a)))
    xs = np.linspace(0.0, a, nx + 1)
    ys = np.linspace(0.0, b, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    vertices = np.column_stack([gx.ravel(), gy.ravel()])

    def index(i, j):
        return j * (nx + 1) + i

    ci, cj = np.meshgrid(np.arange(nx), np.arange(ny))
    ci, cj = ci.ravel(), cj.ravel()
    v00, v10 = index(ci, cj), index(ci + 1, cj)
    v01, v11 = index(ci, cj + 1), index(ci + 1, cj + 1)
    even = (ci + cj) % 2 == 0
    first = np.where(even[:, None], np.column_stack([v00, v10, v11]), np.column_stack([v00, v10, v01]))
    second = np.where(even[:, None], np.column_stack([v00, v11, v01]), np.column_stack([v10, v11, v01]))
    triangles = np.vstack([first, second])

    edges = []
    edges += [(index(i, 0), index(i + 1, 0)) for i in range(nx)]
    edges += [(index(nx, j), index(nx, j + 1)) for j in range(ny)]
    edges += [(index(i + 1, ny), index(i, ny)) for i in reversed(range(nx))]
    edges += [(index(0, j + 1), index(0, j)) for j in reversed(range(ny))]
    return _build(vertices, triangles, edges, boundary, DomainTag(DomainKind.RECTANGLE, (a, b)))


def _ring(radius, count):
    angles = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])


def _stitch(inner, outer):
    """Triangulate the band between two closed rings by merging their angles"""
    n_in, n_out = len(inner), len(outer)
    triangles = []
    i = j = 0
    while i < n_in or j < n_out:
        if j < n_out and (i >= n_in or (j + 1) * n_in <= (i + 1) * n_out):
            triangles.append((inner[i % n_in], outer[j % n_out], outer[(j + 1) % n_out]))
            j += 1
        else:
            triangles.append((inner[i % n_in], outer[j % n_out], inner[(i + 1) % n_in]))
            i += 1
    return triangles


def _loop_edges(ring, reverse=False):
    count = len(ring)
    edges = [(ring[k], ring[(k + 1) % count]) for k in range(count)]
    if reverse:
        edges = [(q, p) for p, q in reversed(edges)]
    return edges


def mesh_disk(radius, resolution, boundary=None):
    """
    Disk of the given radius from concentric rings

    Ring k of resolution // 2 carries 6k vertices; the outer ring lies exactly
    on the circle.
    """
    if not radius > 0 or resolution < MIN_RESOLUTION:
        raise DegenerateGeometry(f"Disk needs a positive radius and resolution >= {MIN_RESOLUTION}, "
                                 f"got R={radius} at {resolution}")
    layers = max(2, int(resolution) // 2)
    blocks = [np.zeros((1, 2))]
    rings = [[0]]
    next_index = 1
    for k in range(1, layers + 1):
        count = 6 * k
        rho = radius if k == layers else radius * k / layers
        blocks.append(_ring(rho, count))
        rings.append(list(range(next_index, next_index + count)))
        next_index += count
    vertices = np.vstack(blocks)

    triangles = []
    centre, first = rings[0][0], rings[1]
    triangles += [(centre, first[j], first[(j + 1) % len(first)]) for j in range(len(first))]
    for inner, outer in zip(rings[1:-1], rings[2:]):
        triangles += _stitch(inner, outer)
    edges = _loop_edges(rings[-1])
    return _build(vertices, triangles, edges, boundary, DomainTag(DomainKind.DISK, (radius,)))


def mesh_annulus(inner_radius, outer_radius, resolution, boundary=None):
    """
    Annulus r < |x| < R from rings whose vertex counts grow with the radius,
    giving two boundary loops: the outer one counter-clockwise, the inner one
    clockwise.
    """
    if not 0 < inner_radius < outer_radius or resolution < MIN_RESOLUTION:
        raise DegenerateGeometry(f"Annulus needs 0 < r < R and resolution >= {MIN_RESOLUTION}, "
                                 f"got r={inner_radius}, R={outer_radius} at {resolution}")
    width = outer_radius - inner_radius
    layers = max(2, int(round(resolution * width / (2.0 * outer_radius))))
    spacing = width / layers
    blocks, rings = [], []
    next_index = 0
    for k in range(layers + 1):
        rho = outer_radius if k == layers else inner_radius + k * spacing
        count = max(8, int(round(2.0 * math.pi * rho / spacing)))
        blocks.append(_ring(rho, count))
        rings.append(list(range(next_index, next_index + count)))
        next_index += count
    vertices = np.vstack(blocks)

    triangles = []
    for inner, outer in zip(rings[:-1], rings[1:]):
        triangles += _stitch(inner, outer)
    edges = _loop_edges(rings[-1]) + _loop_edges(rings[0], reverse=True)
    return _build(vertices, triangles, edges, boundary,
                  DomainTag(DomainKind.ANNULUS, (inner_radius, outer_radius)))


def with_boundary(mesh, boundary):
    """
    Re-tag every boundary edge

    Args:
        mesh: Mesh2D
        boundary: BoundaryOperator, or a callable beta(x, y) evaluated at edge
            midpoints to produce Robin tags

    Returns:
        Mesh2D sharing the geometry of mesh
    """
    if isinstance(boundary, BoundaryOperator):
        tags = tuple([boundary] * len(mesh.boundary_edges))
    else:
        mids = boundary_midpoints(mesh)
        tags = tuple(BoundaryOperator.robin(float(boundary(x, y))) for x, y in mids)
    return replace(mesh, boundary_tags=tags)
