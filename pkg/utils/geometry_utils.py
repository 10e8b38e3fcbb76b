"""
Exact and mesh-based geometric quantities: measures, boundary areas, the
unit-ball volume omega_N and isoperimetric checks
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from utils.core_types import DegenerateGeometry, InvalidDimension
from utils.mesh_utils import boundary_lengths, triangle_areas, validate_mesh

logger = logging.getLogger(__name__)

EXACT_ISOPERIMETRIC_TOL = 1e-9


class GeometrySource(Enum):
    EXACT = 'Exact'
    MESH = 'Mesh'


@dataclass(frozen=True)
class DomainGeometry:
    measure: float
    boundary_area: float
    dimension: int
    source: GeometrySource = GeometrySource.EXACT
    label: str = ''

    def __post_init__(self):
        if not (math.isfinite(self.measure) and self.measure > 0):
            raise DegenerateGeometry(f"Measure must be positive, got {self.measure}")
        if not (math.isfinite(self.boundary_area) and self.boundary_area > 0):
            raise DegenerateGeometry(f"Boundary area must be positive, got {self.boundary_area}")
        if self.dimension < 1:
            raise InvalidDimension(f"Dimension must be >= 1, got {self.dimension}")
        if self.source is GeometrySource.EXACT:
            margin = isoperimetric_check(self)
            if margin < -EXACT_ISOPERIMETRIC_TOL * self.boundary_area:
                raise DegenerateGeometry(f"Isoperimetric inequality violated by {-margin:.3g}")

    @property
    def ratio(self):
        """Area(boundary) / measure"""
        return self.boundary_area / self.measure

    def shrunk(self, factor):
        """Geometry of the domain scaled by factor"""
        if factor <= 0:
            raise DegenerateGeometry(f"Scale factor must be positive, got {factor}")
        n = self.dimension
        return DomainGeometry(self.measure * factor ** n, self.boundary_area * factor ** (n - 1),
                              n, self.source, self.label)


def _gamma_half_integer(x):
    """Gamma at a positive integer or half-integer by recursion from 1 and 1/2"""
    twice = round(2 * x)
    if twice < 1 or abs(2 * x - twice) > 1e-12:
        raise ValueError(f"Gamma recursion needs a positive (half-)integer, got {x}")
    if twice % 2 == 0:
        value, current = 1.0, 1.0
    else:
        value, current = math.sqrt(math.pi), 0.5
    while current < x - 1e-12:
        value *= current
        current += 1.0
    return value


def omega_n(n):
    """
    Lebesgue measure of the unit ball in R^N, pi^(N/2) / Gamma(N/2 + 1)

    Args:
        n: Dimension >= 1

    Returns:
        float
    """
    if n < 1:
        raise InvalidDimension(f"Dimension must be >= 1, got {n}")
    return math.pi ** (n / 2.0) / _gamma_half_integer(n / 2.0 + 1.0)


def ball_geometry(n, radius):
    """Measure omega_N R^N and boundary area N omega_N R^(N-1); N = 1 counts two endpoints"""
    if radius <= 0:
        raise DegenerateGeometry(f"Radius must be positive, got {radius}")
    omega = omega_n(n)
    return DomainGeometry(omega * radius ** n, n * omega * radius ** (n - 1), n,
                          GeometrySource.EXACT, f"ball(N={n}, R={radius:g})")


def rectangle_geometry(a, b):
    if a <= 0 or b <= 0:
        raise DegenerateGeometry(f"Rectangle sides must be positive, got {a} x {b}")
    return DomainGeometry(a * b, 2.0 * (a + b), 2, GeometrySource.EXACT, f"rectangle({a:g}, {b:g})")


def annulus_geometry(inner, outer):
    if not 0 < inner < outer:
        raise DegenerateGeometry(f"Annulus needs 0 < r < R, got r={inner}, R={outer}")
    return DomainGeometry(math.pi * (outer ** 2 - inner ** 2), 2.0 * math.pi * (outer + inner), 2,
                          GeometrySource.EXACT, f"annulus({inner:g}, {outer:g})")


def mesh_geometry(mesh):
    """
    Sum of triangle areas and boundary edge lengths

    Raises:
        InvalidMesh: If the mesh fails validation
    """
    validate_mesh(mesh)
    return DomainGeometry(float(np.sum(triangle_areas(mesh))), float(np.sum(boundary_lengths(mesh))), 2,
                          GeometrySource.MESH, f"mesh({mesh.domain_tag})")


def isoperimetric_check(geometry):
    """
    Area(boundary) - N omega_N^(1/N) |Omega|^((N-1)/N)

    Non-negative for every domain and zero for balls.
    """
    n = geometry.dimension
    bound = n * omega_n(n) ** (1.0 / n) * geometry.measure ** ((n - 1.0) / n)
    return geometry.boundary_area - bound


def isoperimetric_ratio_bound(n, measure):
    """Lower bound N omega_N^(1/N) |Omega|^(-1/N) on Area(boundary)/|Omega|"""
    if measure <= 0:
        raise DegenerateGeometry(f"Measure must be positive, got {measure}")
    return n * omega_n(n) ** (1.0 / n) * measure ** (-1.0 / n)


def boundary_ratio(geometry):
    return geometry.ratio


def robin_upper_bound(geometry, beta_m):
    """beta_m Area(boundary)/|Omega|, the Rayleigh quotient of the constant function"""
    return beta_m * geometry.ratio


def monte_carlo_ball_volume(n, samples=200_000, seed=0):
    """
    Hit-or-miss estimate of omega_N in the cube [-1, 1]^N

    Returns:
        tuple: (estimate, standard_error)
    """
    if n < 1:
        raise InvalidDimension(f"Dimension must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(samples, n))
    hits = np.count_nonzero(np.einsum('ij,ij->i', points, points) <= 1.0)
    fraction = hits / samples
    cube = 2.0 ** n
    return cube * fraction, cube * math.sqrt(fraction * (1.0 - fraction) / samples)
