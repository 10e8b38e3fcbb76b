"""
sweep: run a parameter sweep from a config file and write CSV/SVG artifacts
"""
import logging
import os

from commands import EXIT_OK, print_fields
from config.config import Config
from utils.file_utils import read_sweep_config, write_sweep_csv
from utils.plot_utils import plot_sweep_svg
from utils.sweep_utils import run_sweep

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser('sweep', help='Parameter sweep with rate fit')
    parser.add_argument('--spec', required=True, help='Sweep configuration file (key = value lines)')
    parser.add_argument('--output', help='CSV path (overrides the config file)')
    parser.add_argument('--svg', help='SVG path (overrides the config file)')
    parser.add_argument('--no-timings', action='store_true',
                        help='Leave wall_ms empty so repeated runs give identical bytes')
    parser.add_argument('--threads', type=int, help='Worker cap (defaults to ROBIN_SPECTRA_THREADS)')
    parser.set_defaults(handler=handle_sweep)
    return parser


def default_output(spec_path):
    stem = os.path.splitext(os.path.basename(spec_path))[0]
    return os.path.join(Config.OUTPUT_DIR, f"{stem}.csv")


def handle_sweep(args):
    """Run the configured sweep, print the fitted model and write its table"""
    spec, output, svg = read_sweep_config(args.spec)
    output = args.output or output or default_output(args.spec)
    svg = args.svg or svg

    result = run_sweep(spec, max_workers=args.threads)
    write_sweep_csv(result, output, timings=not args.no_timings)
    if svg:
        plot_sweep_svg(result, svg)

    fields = [
        ('sweep', spec.describe()),
        ('rows', f"{len(result.converged_rows)}/{len(result.rows)} converged"),
        ('model', str(result.model)),
        ('fit quality', f"{result.model.quality:.6f}"),
        ('csv', output),
    ]
    if svg:
        fields.append(('svg', svg))
    if result.exploratory:
        fields.append(('note', 'exploratory sweep; no limit is asserted'))
    print_fields(fields)
    return EXIT_OK
