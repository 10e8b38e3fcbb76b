"""
Robin Spectra - Main Application
Principal eigenvalues of the Laplacian under Robin, Dirichlet and Neumann
boundary conditions, with parameter sweeps and a verification suite.

Features:
- Exact interval solver from the characteristic equations
- Radial shooting on balls in any dimension
- Tridiagonal and P1 finite-element discretizations
- Geometric sweeps with rate fitting, CSV tables and SVG plots
- Verification suite with a pass/fail report

Usage:
    python app.py exact1d --length 1 --left R --beta-left 1 --right D
    python app.py ball --dim 2 --radius 1 --beta 1
    python app.py fem --mesh builtin:disk:1 --beta -1
    python app.py sweep --spec sweeps/interval.cfg
    python app.py verify --fast
"""

import argparse
import logging
import sys

from config.config import Config

from commands import EXIT_USAGE, run_handler
from commands import ball_command, exact1d_command, fem_command, sweep_command, verify_command

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
COMMANDS = (exact1d_command, ball_command, fem_command, sweep_command, verify_command)

logger = logging.getLogger(__name__)


def create_app(config_class=Config):
    """
    Application factory pattern

    Args:
        config_class: Configuration class to use

    Returns:
        argparse.ArgumentParser: Parser with every subcommand registered
    """
    parser = argparse.ArgumentParser(
        prog='robin-spectra',
        description='Principal eigenvalues under Robin, Dirichlet and Neumann boundary conditions',
    )
    parser.add_argument('--verbose', action='store_true', help='Log at DEBUG level')
    parser.set_defaults(config_class=config_class)
    subparsers = parser.add_subparsers(dest='command', metavar='command')

    for module in COMMANDS:
        try:
            module.register(subparsers)
            logger.debug(f"Registered command module {module.__name__}")
        except Exception as e:
            logger.error(f"Error registering {module.__name__}: {e}")
            raise
    return parser


def configure_logging(config_class=Config, verbose=False):
    level = logging.DEBUG if verbose else getattr(logging, config_class.LOG_LEVEL, logging.INFO)
    handlers = [logging.StreamHandler()]
    if config_class.LOG_FILE:
        handlers.append(logging.FileHandler(config_class.LOG_FILE))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


def _log_configuration_status(config_class):
    """Log the effective configuration"""
    config = config_class()
    logger.info("=== Robin Spectra ===")
    logger.info("Configuration Status:")
    logger.info(f"Worker threads: {config.worker_count}")
    logger.info(f"Root tolerance: {config_class.ROOT_ABS_TOL:g}")
    logger.info(f"Eigenvalue tolerance: {config_class.EIG_REL_TOL:g} "
                f"(discretizations {config_class.DISCRETE_REL_TOL:g})")
    logger.info(f"Max iterations: {config_class.MAX_ITERATIONS}")
    logger.info(f"Shooting steps: {config_class.SHOOTING_STEPS}")
    logger.info(f"Tridiagonal cells: {config_class.TRIDIAG_CELLS}")
    logger.info(f"FEM resolution: {config_class.FEM_RESOLUTION}")
    logger.info(f"Output directory: {config_class.OUTPUT_DIR}")
    if config.log_to_file:
        logger.info(f"Log file: {config_class.LOG_FILE}")
    else:
        logger.info("Log file: disabled")
    logger.info("=" * 21)


def main(argv=None):
    """
    Parse arguments and dispatch to the selected command

    Returns:
        int: Exit code (0 success, 1 verification failure, 2 usage error,
            3 solver failure)
    """
    parser = create_app()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    configure_logging(args.config_class, args.verbose)
    _log_configuration_status(args.config_class)
    return run_handler(args.handler, args)


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        sys.exit(130)
