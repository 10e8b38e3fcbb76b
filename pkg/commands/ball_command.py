"""
ball: principal eigenvalue of a ball in R^N by radial shooting
"""
import logging

from commands import EXIT_OK, add_tolerance_arguments, boundary_from_args, print_fields, tolerance_from_args
from config.config import Config
from utils.core_types import TolerancePolicy
from utils.geometry_utils import ball_geometry, robin_upper_bound
from utils.radial_utils import (
    BallProblem,
    asymptotic_slope,
    principal_eigenvalue_ball,
    radial_profile,
    sigma_dot_formula,
)

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('ball', help='Radial ball eigenvalue')
    parser.add_argument('--dim', type=int, required=True, help='Space dimension N >= 1')
    parser.add_argument('--radius', type=float, required=True, help='Ball radius R > 0')
    parser.add_argument('--beta', type=float, help='Robin coefficient on the sphere')
    parser.add_argument('--boundary', choices=['D', 'N', 'R'], help='Boundary kind (R when --beta is given)')
    parser.add_argument('--steps', type=int, default=Config.SHOOTING_STEPS, help='RK4 steps per shot')
    parser.add_argument('--profile', action='store_true', help='Print the (r, xi) samples')
    add_tolerance_arguments(parser)
    parser.set_defaults(handler=handle_ball)
    return parser


def handle_ball(args):
    """Solve one ball problem; Robin balls also report the scaled quantities"""
    boundary = boundary_from_args(args.boundary, args.beta)
    problem = BallProblem(args.dim, args.radius, boundary)
    tol = tolerance_from_args(args, TolerancePolicy.for_discretization())
    logger.info(f"Shooting on ball N={problem.dimension}, R={problem.radius:g}, {boundary}")

    estimate = principal_eigenvalue_ball(problem, tol, args.steps)
    fields = [
        ('ball', f"N={problem.dimension}, R={problem.radius:g}, {boundary}"),
        ('sigma_1', f"{estimate.value:.17g}"),
        ('method', estimate.method.value),
        ('residual', f"{estimate.residual:.3g}"),
        ('Sigma = R^2 sigma_1', f"{problem.radius ** 2 * estimate.value:.17g}"),
    ]
    if not boundary.is_dirichlet:
        beta = boundary.beta
        fields.append(('dSigma/dR', f"{sigma_dot_formula(args.dim, args.radius, beta, tol, args.steps):.12g}"))
        fields.append(('small-R slope', f"{asymptotic_slope(args.dim, beta):.12g}"))
        geometry = ball_geometry(args.dim, args.radius)
        fields.append(('constant-function bound', f"{robin_upper_bound(geometry, beta):.12g}"))
    print_fields(fields)

    if args.profile:
        r, xi = radial_profile(estimate)
        for ri, value in zip(r, xi):
            print(f"{ri:.17g} {value:.17g}")
    return EXIT_OK
