"""
Weighted P1 discretization of -(r^(N-1) u')' = sigma r^(N-1) u on (0, L) and
its smallest eigenpair by Sturm bisection
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from config.config import Config
from utils.core_types import (
    EigenEstimate,
    EigenMethod,
    InvalidMesh,
    MaxIterations,
    SolverFailure,
    TolerancePolicy,
    TooCoarse,
    validate,
)

logger = logging.getLogger(__name__)

MIN_CELLS = 16


@dataclass(frozen=True, eq=False)
class Tridiag:
    """
    Symmetric pencil (K, D): K tridiagonal with diagonal `diag` and
    off-diagonal `off`, D the diagonal lumped mass
    """
    diag: np.ndarray
    off: np.ndarray
    mass_diag: np.ndarray
    nodes: Optional[np.ndarray] = None
    length: float = 1.0
    dirichlet_left: bool = False
    dirichlet_right: bool = False

    def __post_init__(self):
        n = len(self.diag)
        if n < 1 or len(self.off) != n - 1 or len(self.mass_diag) != n:
            raise InvalidMesh(f"Tridiagonal shapes disagree: {n}, {len(self.off)}, {len(self.mass_diag)}")
        if not np.all(np.asarray(self.mass_diag) > 0):
            raise InvalidMesh("Mass weights must be strictly positive")

    @property
    def n(self):
        return len(self.diag)

    def matvec(self, y):
        """K y"""
        out = self.diag * y
        out[:-1] += self.off * y[1:]
        out[1:] += self.off * y[:-1]
        return out


def assemble_1d(problem, n):
    """
    Assemble the weighted P1 pencil on n uniform cells

    Args:
        problem: Problem1D (radial_dimension N >= 1)
        n: Number of cells, at least 16

    Returns:
        Tridiag over the unknown nodes (Dirichlet ends eliminated)

    Raises:
        TooCoarse: If n < 16
    """
    validate(problem)
    if n < MIN_CELLS:
        raise TooCoarse(f"Need at least {MIN_CELLS} cells, got {n}")
    dim = problem.radial_dimension
    length = problem.length
    h = length / n
    nodes = np.linspace(0.0, length, n + 1)
    nodes[-1] = length
    a, b = nodes[:-1], nodes[1:]
    mid = 0.5 * (a + b)

    # int r^(N-1) over each cell and each half cell
    weight = (b ** dim - a ** dim) / dim
    stiffness = weight / h ** 2
    lower_half = (mid ** dim - a ** dim) / dim
    upper_half = (b ** dim - mid ** dim) / dim

    diag = np.zeros(n + 1)
    diag[:-1] += stiffness
    diag[1:] += stiffness
    off = -stiffness.copy()
    mass = np.zeros(n + 1)
    mass[:-1] += lower_half
    mass[1:] += upper_half

    left, right = problem.left, problem.right
    if not left.is_dirichlet:
        # r^(N-1) vanishes at the core for N >= 2, which carries Neumann anyway
        diag[0] += left.beta * (1.0 if dim == 1 else 0.0)
    if not right.is_dirichlet:
        diag[-1] += right.beta * length ** (dim - 1)

    start = 1 if left.is_dirichlet else 0
    stop = n if right.is_dirichlet else n + 1
    return Tridiag(diag[start:stop].copy(), off[start:stop - 1].copy(), mass[start:stop].copy(), nodes,
                   length, left.is_dirichlet, right.is_dirichlet)


@dataclass(frozen=True)
class NodalProfile:
    """Piecewise-linear interpolant through nodal values"""
    nodes: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.nodes, self.values)


def smallest_eig_tridiag(m, tol=None):
    """
    Smallest generalized eigenpair of a Tridiag pencil

    The pencil is scaled symmetrically by D^(-1/2) and handed to LAPACK's
    Sturm-count bisection (stebz) with inverse iteration (stein) for the vector.

    Args:
        m: Tridiag
        tol: TolerancePolicy (discretization defaults)

    Returns:
        EigenEstimate; the eigenfunction interpolates the nodes when m.nodes is set

    Raises:
        MaxIterations: If LAPACK does not converge
        SolverFailure: If the eigenvector changes sign
    """
    tol = tol or TolerancePolicy.for_discretization()
    scale = 1.0 / np.sqrt(m.mass_diag)
    d = m.diag * scale ** 2
    e = m.off * scale[:-1] * scale[1:]
    if m.n == 1:
        values, vectors = np.array([d[0]]), np.ones((1, 1))
    else:
        try:
            values, vectors = eigh_tridiagonal(d, e, select='i', select_range=(0, 0), lapack_driver='stebz')
        except LinAlgError as err:
            raise MaxIterations(f"Sturm bisection did not converge: {err}") from err
    value = float(values[0])
    y = vectors[:, 0] * scale
    y = y if y.sum() >= 0 else -y
    y = y / np.max(np.abs(y))
    if np.any(y <= 0):
        raise SolverFailure(f"Tridiagonal eigenvector changes sign (lambda={value:.6g})")

    defect = m.matvec(y) - value * m.mass_diag * y
    k_norm = np.max(np.abs(m.diag)) + 2.0 * (np.max(np.abs(m.off)) if m.n > 1 else 0.0)
    residual = float(np.linalg.norm(defect) / (k_norm * np.linalg.norm(y)))
    if residual > tol.eig_rel_tol:
        raise MaxIterations(f"Tridiagonal residual {residual:.3g} exceeds {tol.eig_rel_tol:.3g}")

    eigenfunction = None
    domain = None
    if m.nodes is not None:
        full = np.zeros(len(m.nodes))
        start = 1 if m.dirichlet_left else 0
        full[start:start + m.n] = y
        eigenfunction = NodalProfile(m.nodes, full)
        domain = (0.0, m.length)
    else:
        eigenfunction = NodalProfile(np.arange(m.n, dtype=float), y)
    logger.debug(f"Tridiagonal pencil of size {m.n}: lambda={value:.12g}, residual={residual:.3g}")
    return EigenEstimate(value, residual, EigenMethod.TRIDIAGONAL, eigenfunction, domain, 1,
                         details={'cells': len(m.nodes) - 1 if m.nodes is not None else m.n})


def principal_eigenvalue_tridiag(problem, n=None, tol=None):
    """assemble_1d followed by smallest_eig_tridiag; n defaults to Config.TRIDIAG_CELLS"""
    return smallest_eig_tridiag(assemble_1d(problem, n or Config.TRIDIAG_CELLS), tol)
