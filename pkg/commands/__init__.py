"""
Command-line subcommands; each module exposes register(subparsers)
"""
import logging

from utils.core_types import (
    BoundaryOperator,
    ConfigError,
    DegenerateGeometry,
    InvalidDimension,
    InvalidMesh,
    NonFiniteValue,
    NonPositiveLength,
    RadialWithoutNeumannCore,
    RobinSpectraError,
    TooCoarse,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_SOLVER_FAILED = 3

# Bad input rather than a numerical failure
USAGE_ERRORS = (
    ConfigError,
    DegenerateGeometry,
    InvalidDimension,
    InvalidMesh,
    NonFiniteValue,
    NonPositiveLength,
    RadialWithoutNeumannCore,
    TooCoarse,
)


def run_handler(handler, args):
    """
    Call a command handler and map its errors to an exit code

    Returns:
        int: The handler's exit code, 2 for usage errors, 3 for solver failures
    """
    try:
        return handler(args)
    except USAGE_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except RobinSpectraError as e:
        logger.error(f"Solver failure ({type(e).__name__}): {e}")
        return EXIT_SOLVER_FAILED
    except OSError as e:
        logger.error(f"File error: {e}")
        return EXIT_USAGE


def add_tolerance_arguments(parser):
    group = parser.add_argument_group('tolerances')
    group.add_argument('--root-abs-tol', type=float, help='Absolute tolerance on roots')
    group.add_argument('--eig-rel-tol', type=float, help='Relative tolerance on eigenvalues')
    group.add_argument('--max-iterations', type=int, help='Iteration cap for root finding')


def tolerance_from_args(args, base):
    """TolerancePolicy from base with the CLI overrides applied"""
    return base.with_overrides(root_abs_tol=args.root_abs_tol, eig_rel_tol=args.eig_rel_tol,
                               max_iterations=args.max_iterations)


def boundary_from_args(kind, beta, default_kind='N'):
    """
    BoundaryOperator from a --boundary style tag and an optional --beta

    A bare beta implies Robin; neither given yields default_kind.
    """
    if kind is None:
        if beta is None:
            return BoundaryOperator.parse(default_kind)
        kind = 'R'
    if kind.upper() != 'R' and beta is not None:
        raise ConfigError(f"Boundary {kind} takes no coefficient")
    return BoundaryOperator.parse(kind, beta)


def print_fields(fields):
    """Print aligned 'name: value' lines"""
    width = max(len(name) for name, _ in fields)
    for name, value in fields:
        print(f"{name:<{width}} : {value}")
