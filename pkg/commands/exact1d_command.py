"""
exact1d: principal eigenvalue of -u'' = sigma u on (0, L) with two endpoint conditions
"""
import logging

import numpy as np

from commands import EXIT_OK, add_tolerance_arguments, print_fields, tolerance_from_args
from utils.core_types import BoundaryOperator, Problem1D, TolerancePolicy
from utils.exact1d_utils import limiting_behavior, principal_eigenvalue_1d, small_length_rate

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('exact1d', help='Exact interval eigenvalue')
    parser.add_argument('--length', type=float, required=True, help='Interval length L > 0')
    parser.add_argument('--left', required=True, choices=['D', 'N', 'R', 'd', 'n', 'r'],
                        help='Condition at x = 0')
    parser.add_argument('--right', required=True, choices=['D', 'N', 'R', 'd', 'n', 'r'],
                        help='Condition at x = L')
    parser.add_argument('--beta-left', type=float, help='Robin coefficient at x = 0')
    parser.add_argument('--beta-right', type=float, help='Robin coefficient at x = L')
    parser.add_argument('--samples', type=int, default=0,
                        help='Print the eigenfunction at this many equispaced points')
    add_tolerance_arguments(parser)
    parser.set_defaults(handler=handle_exact1d)
    return parser


def handle_exact1d(args):
    """Solve one interval problem and print sigma_1 with its classification"""
    left = BoundaryOperator.parse(args.left, args.beta_left)
    right = BoundaryOperator.parse(args.right, args.beta_right)
    problem = Problem1D(args.length, left, right)
    tol = tolerance_from_args(args, TolerancePolicy.from_config())
    logger.info(f"Solving {problem}")

    estimate = principal_eigenvalue_1d(problem, tol)
    rate = small_length_rate(left, right)
    print_fields([
        ('problem', str(problem)),
        ('sigma_1', f"{estimate.value:.17g}"),
        ('method', estimate.method.value),
        ('case', estimate.details.get('case')),
        ('regime', estimate.details.get('regime')),
        ('residual', f"{estimate.residual:.3g}"),
        ('limit L->0', f"{limiting_behavior(left, right):g}"),
        ('rate L->0', f"{rate.coefficient:.12g} * L^{rate.exponent:g}"),
    ])
    if args.samples > 0:
        x = np.linspace(0.0, problem.length, args.samples)
        for xi, value in zip(x, estimate.sample(x)):
            print(f"{xi:.17g} {value:.17g}")
    return EXIT_OK
