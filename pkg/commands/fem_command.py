"""
fem: principal eigenvalue of a planar domain by P1 finite elements
"""
import logging

from commands import EXIT_OK, add_tolerance_arguments, boundary_from_args, print_fields, tolerance_from_args
from config.config import Config
from utils.core_types import ConfigError, TolerancePolicy
from utils.fem_utils import principal_eigenvalue_fem
from utils.file_utils import read_mesh, write_mesh
from utils.geometry_utils import isoperimetric_check, mesh_geometry
from utils.mesh_utils import mesh_annulus, mesh_disk, mesh_rectangle, with_boundary

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = 'builtin:'
BUILTINS = {
    'rectangle': (mesh_rectangle, 2),
    'disk': (mesh_disk, 1),
    'annulus': (mesh_annulus, 2),
}


def register(subparsers):
    parser = subparsers.add_parser('fem', help='Finite-element eigenvalue on a mesh')
    parser.add_argument('--mesh', required=True,
                        help='Mesh file, or builtin:rectangle:a:b, builtin:disk:R, builtin:annulus:r:R')
    parser.add_argument('--beta', type=float, help='Robin coefficient applied to every boundary edge')
    parser.add_argument('--boundary', choices=['D', 'N', 'R'], help='Boundary kind (R when --beta is given)')
    parser.add_argument('--resolution', type=int, default=Config.FEM_RESOLUTION,
                        help='Builtin mesh size: cells along the first rectangle side, or across '
                             'the outer diameter of a disk or annulus (>= 8)')
    parser.add_argument('--write-mesh', help='Save the mesh used to this path')
    add_tolerance_arguments(parser)
    parser.set_defaults(handler=handle_fem)
    return parser


def load_mesh(source, resolution, boundary=None):
    """
    Mesh from a file path or a builtin:<shape>:<sizes> descriptor

    Raises:
        ConfigError: On an unknown builtin or malformed sizes
        InvalidMesh: On an unreadable mesh file
    """
    if not source.startswith(BUILTIN_PREFIX):
        mesh = read_mesh(source)
        return with_boundary(mesh, boundary) if boundary is not None else mesh

    parts = source[len(BUILTIN_PREFIX):].split(':')
    shape, sizes = parts[0].lower(), parts[1:]
    if shape not in BUILTINS:
        raise ConfigError(f"Unknown builtin mesh '{shape}'; choose from {', '.join(BUILTINS)}")
    builder, arity = BUILTINS[shape]
    if len(sizes) != arity:
        raise ConfigError(f"builtin:{shape} takes {arity} size(s), got {len(sizes)}")
    try:
        sizes = [float(v) for v in sizes]
    except ValueError as e:
        raise ConfigError(f"Invalid mesh sizes in '{source}'") from e
    return builder(*sizes, resolution, boundary)


def handle_fem(args):
    """Solve the mesh problem and print sigma_1 with mesh diagnostics"""
    explicit = args.boundary is not None or args.beta is not None
    boundary = boundary_from_args(args.boundary, args.beta) if explicit else None
    mesh = load_mesh(args.mesh, args.resolution, boundary)
    if args.write_mesh:
        write_mesh(mesh, args.write_mesh)
    tol = tolerance_from_args(args, TolerancePolicy.for_discretization())
    logger.info(f"Solving on {mesh!r}")

    estimate = principal_eigenvalue_fem(mesh, None, tol)
    geometry = mesh_geometry(mesh)
    print_fields([
        ('mesh', repr(mesh)),
        ('sigma_1', f"{estimate.value:.17g}"),
        ('method', estimate.method.value),
        ('residual', f"{estimate.residual:.3g}"),
        ('unknowns', estimate.details['unknowns']),
        ('spectral lower bound', f"{estimate.details['lower_bound']:.6g}"),
        ('measure', f"{geometry.measure:.12g}"),
        ('boundary length', f"{geometry.boundary_area:.12g}"),
        ('isoperimetric margin', f"{isoperimetric_check(geometry):.6g}"),
    ])
    return EXIT_OK
