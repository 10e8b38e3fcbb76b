"""
verify: run the verification suite and print the pass/fail table
"""
import logging

from commands import EXIT_OK, EXIT_VERIFY_FAILED, add_tolerance_arguments, tolerance_from_args
from utils.core_types import ConfigError, TolerancePolicy
from utils.verify_utils import CHECK_NAMES, verify_all

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('verify', help='Run every verification check')
    parser.add_argument('--fast', action='store_true', help='Smaller batteries and resolutions')
    parser.add_argument('--check', action='append', metavar='NAME',
                        help='Run only this check (repeatable)')
    parser.add_argument('--list', action='store_true', help='List the check names and exit')
    parser.add_argument('--robin-sign', type=float, default=1.0,
                        help='Multiplier on the FEM Robin term (-1 injects a sign error)')
    parser.add_argument('--threads', type=int, help='Worker cap (defaults to ROBIN_SPECTRA_THREADS)')
    add_tolerance_arguments(parser)
    parser.set_defaults(handler=handle_verify)
    return parser


def handle_verify(args):
    """Run the suite; exit status 1 when any check fails"""
    if args.list:
        for name in CHECK_NAMES:
            print(name)
        return EXIT_OK
    unknown = sorted(set(args.check or []) - set(CHECK_NAMES))
    if unknown:
        raise ConfigError(f"Unknown check(s): {', '.join(unknown)}")

    tol = tolerance_from_args(args, TolerancePolicy.from_config())
    report = verify_all(tol, fast=args.fast, robin_sign=args.robin_sign, max_workers=args.threads,
                        only=args.check)
    print(report.render())
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED
