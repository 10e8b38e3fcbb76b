"""
P1 finite elements for -Laplace u = sigma u with Robin, Neumann and Dirichlet
boundary edges, and the smallest eigenpair of the resulting sparse pencil
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from matplotlib.tri import LinearTriInterpolator, Triangulation
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, cg, eigsh, splu

from utils.core_types import (
    DegenerateGeometry,
    EigenEstimate,
    EigenMethod,
    IndefiniteShift,
    MaxIterations,
    NonFiniteValue,
    SolverFailure,
    TolerancePolicy,
)
from utils.mesh_utils import boundary_lengths, boundary_midpoints, triangle_areas, validate_mesh

logger = logging.getLogger(__name__)

SHIFT_RETRIES = 8
POLISH_PASSES = 20
INNER_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SparseSym:
    """Symmetric sparse matrix held in CSR form with duplicates summed"""
    matrix: sp.csr_matrix

    @classmethod
    def from_triplets(cls, rows, cols, values, n):
        coo = sp.coo_matrix((values, (rows, cols)), shape=(n, n))
        matrix = coo.tocsr()
        matrix.sum_duplicates()
        return cls(matrix)

    @property
    def n(self):
        return self.matrix.shape[0]

    def entries(self):
        """Upper-triangle coordinates (row <= col)"""
        upper = sp.triu(self.matrix, format='coo')
        return upper.row, upper.col, upper.data

    def is_symmetric(self, rel_tol=1e-12):
        diff = abs(self.matrix - self.matrix.T)
        scale = max(1.0, abs(self.matrix).max())
        return diff.nnz == 0 or diff.max() <= rel_tol * scale

    def diagonal(self):
        return self.matrix.diagonal()


@dataclass(frozen=True, eq=False)
class FemSystem:
    A: SparseSym
    M: SparseSym
    free_vertices: np.ndarray
    lower_bound: float
    mesh: object = None
    conflicts: int = 0


def _edge_betas(mesh, beta):
    """Per-edge Robin coefficient (nan on Dirichlet edges)"""
    tags = mesh.boundary_tags
    dirichlet = np.array([tag.is_dirichlet for tag in tags], dtype=bool)
    if beta is None:
        values = np.array([np.nan if tag.is_dirichlet else tag.beta for tag in tags], dtype=float)
    elif callable(beta):
        mids = boundary_midpoints(mesh)
        values = np.array([float(beta(x, y)) for x, y in mids], dtype=float)
    else:
        values = np.full(len(tags), float(beta))
    values[dirichlet] = np.nan
    if not np.all(np.isfinite(values[~dirichlet])):
        raise NonFiniteValue("Robin coefficient must be finite on every Robin edge")
    return values, dirichlet


def assemble_fem(mesh, beta=None, robin_sign=1.0):
    """
    Assemble the stiffness-plus-boundary matrix and the consistent mass

    Args:
        mesh: Mesh2D
        beta: None to use the edge tags, or a float / callable beta(x, y)
            overriding every non-Dirichlet edge (evaluated at edge midpoints)
        robin_sign: Multiplier on the boundary term (1 for the true operator)

    Returns:
        FemSystem with A, M restricted to non-Dirichlet vertices
    """
    validate_mesh(mesh)
    vertices, triangles = mesh.vertices, mesh.triangles
    n = len(vertices)
    areas = triangle_areas(mesh)

    x, y = vertices[triangles, 0], vertices[triangles, 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    stiffness = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4.0 * areas[:, None, None])
    mass = (np.ones((3, 3)) + np.eye(3))[None, :, :] * (areas / 12.0)[:, None, None]
    rows = np.repeat(triangles, 3, axis=1).ravel()
    cols = np.tile(triangles, (1, 3)).ravel()

    betas, dirichlet = _edge_betas(mesh, beta)
    edges = mesh.boundary_edges
    lengths = boundary_lengths(mesh)
    robin = ~dirichlet
    effective = robin_sign * betas[robin]
    pair = (lengths[robin] * effective / 6.0)[:, None, None] * np.array([[2.0, 1.0], [1.0, 2.0]])[None]
    e = edges[robin]
    b_rows = np.repeat(e, 2, axis=1).ravel()
    b_cols = np.tile(e, (1, 2)).ravel()

    A_full = SparseSym.from_triplets(np.concatenate([rows, b_rows]), np.concatenate([cols, b_cols]),
                                     np.concatenate([stiffness.ravel(), pair.ravel()]), n).matrix
    M_full = SparseSym.from_triplets(rows, cols, mass.ravel(), n).matrix

    fixed = np.zeros(n, dtype=bool)
    fixed[edges[dirichlet].ravel()] = True
    touched = np.zeros(n, dtype=bool)
    touched[e[effective != 0].ravel()] = True
    conflicts = int(np.count_nonzero(fixed & touched))
    if conflicts:
        logger.warning(f"{conflicts} vertices share Dirichlet and Robin edges; treated as Dirichlet")

    free = np.flatnonzero(~fixed)
    if free.size == 0:
        raise SolverFailure("Every vertex is Dirichlet; nothing to solve")
    A = SparseSym(A_full[free][:, free].tocsr())
    M = SparseSym(M_full[free][:, free].tocsr())

    lumped = np.bincount(triangles.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=n)
    negative = np.maximum(0.0, -effective) * lengths[robin] / 2.0
    boundary_mass = np.bincount(e.ravel(), weights=np.repeat(negative, 2), minlength=n)
    ratios = boundary_mass[free] / lumped[free]
    lower_bound = -4.0 * float(ratios.max()) if ratios.size else 0.0
    logger.debug(f"Assembled {mesh!r}: {free.size} unknowns, lower bound {lower_bound:.6g}")
    return FemSystem(A, M, free, lower_bound, mesh, conflicts)


def spectral_lower_bound(system):
    """Guaranteed lower bound on the smallest eigenvalue of the assembled pencil"""
    return system.lower_bound


def _gershgorin_shift(A, M):
    """Fallback lower bound when no hint is given: Gershgorin on A over the mass floor"""
    a = A.matrix
    radius = np.asarray(abs(a).sum(axis=1)).ravel() - np.abs(a.diagonal())
    g = float(np.min(a.diagonal() - radius))
    m = M.matrix
    m_radius = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(m.diagonal())
    floor = float(np.min(m.diagonal() - m_radius))
    if floor <= 0:
        floor = 0.5 * float(np.min(m.diagonal()))
    return min(0.0, g) / floor


@dataclass(frozen=True)
class DofVector:
    """Eigenvector indexed by unknown number"""
    values: np.ndarray

    def __call__(self, index):
        return self.values[np.asarray(index, dtype=np.int64)]


def smallest_eig_sparse(A, M, shift_hint=None, tol=None):
    """
    Smallest eigenpair of the pencil (A, M) by shift-invert below the spectrum

    The shift starts below shift_hint and is lowered geometrically whenever the
    factorization or an inner solve fails. The Lanczos result is polished by
    inverse iteration with Jacobi-preconditioned CG until the Rayleigh
    quotient stalls.

    Args:
        A, M: SparseSym stiffness (possibly indefinite) and mass (definite)
        shift_hint: Lower bound on the smallest eigenvalue, if known
        tol: TolerancePolicy (discretization defaults)

    Returns:
        EigenEstimate whose eigenfunction maps unknown index to value

    Raises:
        IndefiniteShift: If no admissible shift is found
        MaxIterations: If the polished pair misses the defect bound
    """
    tol = tol or TolerancePolicy.for_discretization()
    bound = _gershgorin_shift(A, M) if shift_hint is None else float(shift_hint)
    tau = bound - 1e-2 * (1.0 + abs(bound))
    a, m = A.matrix.tocsc(), M.matrix.tocsc()
    n = A.n

    last_error = None
    for attempt in range(SHIFT_RETRIES):
        try:
            value, vector, passes = _solve_at_shift(a, m, tau, tol, n)
        except (RuntimeError, ArpackError, ArpackNoConvergence, _ShiftTooHigh) as e:
            last_error = e
            logger.warning(f"Shift {tau:.6g} rejected ({e}); lowering")
            tau = 4.0 * tau - 1.0 if tau < 0 else -1.0 - tau
            continue
        vector = vector if vector.sum() >= 0 else -vector
        vector = vector / np.max(np.abs(vector))
        defect = np.linalg.norm(a @ vector - value * (m @ vector))
        allowed = tol.eig_rel_tol * np.linalg.norm(a @ vector) + 1e-12
        if defect > allowed:
            raise MaxIterations(f"Eigenpair defect {defect:.3g} exceeds {allowed:.3g} after {passes} passes")
        residual = defect / max(np.linalg.norm(a @ vector), np.linalg.norm(m @ vector) * max(1.0, abs(value)))
        return EigenEstimate(float(value), float(residual), EigenMethod.FEM,
                             DofVector(vector), None, passes,
                             details={'shift': tau, 'attempts': attempt + 1})
    raise IndefiniteShift(f"No admissible shift after {SHIFT_RETRIES} attempts: {last_error}")


class _ShiftTooHigh(Exception):
    pass


def _solve_at_shift(a, m, tau, tol, n):
    shifted = (a - tau * m).tocsc()
    if n <= 2:
        dense_a, dense_m = a.toarray(), m.toarray()
        from scipy.linalg import eigh
        values, vectors = eigh(dense_a, dense_m)
        if values[0] < tau:
            raise _ShiftTooHigh(f"eigenvalue {values[0]:.6g} below shift")
        return float(values[0]), vectors[:, 0], 0

    factor = splu(shifted)
    inverse = LinearOperator((n, n), matvec=factor.solve, dtype=float)
    values, vectors = eigsh(a, k=1, M=m, sigma=tau, which='LM', OPinv=inverse,
                            maxiter=max(1000, 10 * tol.max_iterations))
    value, x = float(values[0]), vectors[:, 0]
    if value < tau:
        raise _ShiftTooHigh(f"eigenvalue {value:.6g} below shift")

    diagonal = shifted.diagonal()
    if np.any(diagonal <= 0):
        raise _ShiftTooHigh("shifted matrix has a non-positive diagonal")
    jacobi = LinearOperator((n, n), matvec=lambda v: v / diagonal, dtype=float)
    x = x / math.sqrt(x @ (m @ x))
    rayleigh = (x @ (a @ x))
    passes = 0
    for passes in range(1, POLISH_PASSES + 1):
        y, info = cg(shifted, m @ x, x0=x / max(rayleigh - tau, 1e-300), rtol=INNER_RTOL, atol=0.0,
                     M=jacobi, maxiter=10 * n)
        if info < 0:
            raise _ShiftTooHigh(f"inner solve breakdown ({info})")
        y_norm = y @ (m @ y)
        if not y_norm > 0:
            raise _ShiftTooHigh("shifted matrix is not positive definite")
        x = y / math.sqrt(y_norm)
        previous, rayleigh = rayleigh, (x @ (a @ x))
        if rayleigh < tau:
            raise _ShiftTooHigh(f"Rayleigh quotient {rayleigh:.6g} below shift")
        if abs(rayleigh - previous) <= tol.eig_rel_tol * max(1.0, abs(rayleigh)) * 1e-3:
            break
    return rayleigh, x, passes


@dataclass(frozen=True, eq=False)
class MeshFunction:
    """Piecewise-linear function on a mesh, zero outside it"""
    mesh: object
    nodal: np.ndarray
    _interpolator: object = field(default=None, repr=False)

    @classmethod
    def build(cls, mesh, nodal):
        triangulation = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.triangles)
        return cls(mesh, nodal, LinearTriInterpolator(triangulation, nodal))

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        values = self._interpolator(points[..., 0], points[..., 1])
        return np.ma.filled(np.ma.asarray(values, dtype=float), 0.0)


def interior_vertices(mesh):
    on_boundary = np.zeros(len(mesh.vertices), dtype=bool)
    on_boundary[mesh.boundary_edges.ravel()] = True
    return np.flatnonzero(~on_boundary)


def principal_eigenvalue_fem(mesh, beta=None, tol=None, robin_sign=1.0):
    """
    Principal eigenpair on a mesh

    Args:
        mesh: Mesh2D
        beta: None (edge tags), float, or callable beta(x, y)
        tol: TolerancePolicy (discretization defaults)
        robin_sign: Multiplier on the boundary term

    Returns:
        EigenEstimate with a MeshFunction eigenfunction on points (..., 2)

    Raises:
        SolverFailure: If the eigenvector is not positive at interior vertices
    """
    tol = tol or TolerancePolicy.for_discretization()
    system = assemble_fem(mesh, beta, robin_sign)
    estimate = smallest_eig_sparse(system.A, system.M, system.lower_bound, tol)

    nodal = np.zeros(len(mesh.vertices))
    nodal[system.free_vertices] = estimate.eigenfunction.values
    interior = interior_vertices(mesh)
    if interior.size and nodal[interior].min() <= 0:
        raise SolverFailure(f"Eigenvector changes sign at interior vertices of {mesh!r}")
    return EigenEstimate(estimate.value, estimate.residual, EigenMethod.FEM, MeshFunction.build(mesh, nodal),
                         None, estimate.iterations,
                         details=dict(estimate.details, unknowns=int(system.free_vertices.size),
                                      lower_bound=system.lower_bound, conflicts=system.conflicts))


def dirichlet_square_value(side):
    """2 pi**2 / side**2, the Dirichlet eigenvalue of the square of that side"""
    if side <= 0:
        raise DegenerateGeometry(f"Square side must be positive, got {side}")
    return 2.0 * math.pi ** 2 / side ** 2
