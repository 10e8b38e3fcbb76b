"""
Tests for the command-line entry point and its exit codes
"""
import math

import pytest

from app import create_app, main
from commands import EXIT_OK, EXIT_SOLVER_FAILED, EXIT_USAGE, boundary_from_args
from commands.fem_command import load_mesh
from config.config import Config
from utils.core_types import BoundaryOperator, ConfigError
from utils.file_utils import write_mesh
from utils.mesh_utils import DomainKind, mesh_rectangle
from utils.verify_utils import CHECK_NAMES


@pytest.fixture(autouse=True)
def no_log_file(monkeypatch, tmp_path):
    monkeypatch.setattr(Config, 'LOG_FILE', '')
    monkeypatch.setattr(Config, 'OUTPUT_DIR', str(tmp_path / 'results'))


def _fields(output):
    fields = {}
    for line in output.splitlines():
        if ' : ' in line:
            name, value = line.split(' : ', 1)
            fields[name.strip()] = value.strip()
    return fields


def test_parser_lists_every_command():
    parser = create_app()
    help_text = parser.format_help()
    for command in ('exact1d', 'ball', 'fem', 'sweep', 'verify'):
        assert command in help_text


def test_exact1d(capsys):
    assert main(['exact1d', '--length', '1', '--left', 'D', '--right', 'D']) == EXIT_OK
    fields = _fields(capsys.readouterr().out)
    assert float(fields['sigma_1']) == pytest.approx(math.pi ** 2, rel=1e-12)
    assert fields['method'] == 'ClosedForm'


def test_exact1d_samples(capsys):
    assert main(['exact1d', '--length', '2', '--left', 'R', '--beta-left', '1',
                 '--right', 'N', '--samples', '5']) == EXIT_OK
    lines = [line for line in capsys.readouterr().out.splitlines() if ' : ' not in line]
    assert len(lines) == 5
    assert max(float(line.split()[1]) for line in lines) <= 1.0 + 1e-12


def test_ball(capsys):
    assert main(['ball', '--dim', '3', '--radius', '1', '--boundary', 'D', '--steps', '1024']) == EXIT_OK
    fields = _fields(capsys.readouterr().out)
    assert float(fields['sigma_1']) == pytest.approx(math.pi ** 2, rel=1e-4)


def test_ball_robin_reports_scaled_quantities(capsys):
    assert main(['ball', '--dim', '2', '--radius', '0.5', '--beta', '1', '--steps', '1024']) == EXIT_OK
    fields = _fields(capsys.readouterr().out)
    assert float(fields['small-R slope']) == pytest.approx(2.0)
    assert float(fields['sigma_1']) < float(fields['constant-function bound'])


def test_fem_builtin(capsys):
    assert main(['fem', '--mesh', 'builtin:rectangle:1:1', '--boundary', 'D', '--resolution', '16']) == EXIT_OK
    fields = _fields(capsys.readouterr().out)
    assert float(fields['sigma_1']) == pytest.approx(2 * math.pi ** 2, rel=5e-2)
    assert int(fields['unknowns']) == 15 * 15


def test_fem_mesh_file(tmp_path, capsys):
    path = str(tmp_path / 'square.mesh')
    write_mesh(mesh_rectangle(1.0, 1.0, 8), path)
    saved = str(tmp_path / 'copy.mesh')
    assert main(['fem', '--mesh', path, '--beta', '1', '--write-mesh', saved]) == EXIT_OK
    fields = _fields(capsys.readouterr().out)
    assert 0 < float(fields['sigma_1']) < 4.0
    assert (tmp_path / 'copy.mesh').exists()


def test_sweep(tmp_path, capsys):
    spec = tmp_path / 'dd.cfg'
    spec.write_text("family = interval\nleft = D\nright = D\nstart = 1\nfactor = 0.5\ncount = 4\n")
    svg = tmp_path / 'dd.svg'
    assert main(['sweep', '--spec', str(spec), '--svg', str(svg), '--no-timings']) == EXIT_OK
    fields = _fields(capsys.readouterr().out)
    assert fields['model'].startswith('PowerLaw')
    assert (tmp_path / 'results' / 'dd.csv').exists()
    assert svg.exists()


def test_verify_list(capsys):
    assert main(['verify', '--list']) == EXIT_OK
    assert capsys.readouterr().out.split() == list(CHECK_NAMES)


def test_verify_single_check(capsys):
    assert main(['verify', '--fast', '--check', 'closed_forms']) == EXIT_OK
    assert 'closed_forms' in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [],
    ['unknown'],
    ['exact1d', '--length', '1', '--left', 'D'],
    ['exact1d', '--length', '-1', '--left', 'D', '--right', 'D'],
    ['exact1d', '--length', '1', '--left', 'R', '--right', 'D'],
    ['ball', '--dim', '0', '--radius', '1', '--boundary', 'D'],
    ['ball', '--dim', '2', '--radius', '1', '--boundary', 'D', '--beta', '1'],
    ['fem', '--mesh', 'builtin:cube:1'],
    ['fem', '--mesh', 'builtin:disk:1:2'],
    ['fem', '--mesh', 'missing.mesh'],
    ['fem', '--mesh', 'builtin:disk:1', '--resolution', '2'],
    ['sweep', '--spec', 'missing.cfg'],
    ['verify', '--check', 'no_such_check'],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_solver_failure_exit_code():
    argv = ['exact1d', '--length', '1', '--left', 'R', '--beta-left', '1', '--right', 'R', '--beta-right', '1',
            '--root-abs-tol', '1e-2', '--eig-rel-tol', '1e-14']
    assert main(argv) == EXIT_SOLVER_FAILED


def test_boundary_from_args():
    assert boundary_from_args(None, None) == BoundaryOperator.neumann()
    assert boundary_from_args(None, 2.0) == BoundaryOperator.robin(2.0)
    assert boundary_from_args('D', None) == BoundaryOperator.dirichlet()
    with pytest.raises(ConfigError):
        boundary_from_args('N', 1.0)


def test_load_builtin_meshes():
    assert load_mesh('builtin:disk:2', 16).domain_tag.kind is DomainKind.DISK
    annulus = load_mesh('builtin:annulus:0.5:1', 16, BoundaryOperator.dirichlet())
    assert annulus.domain_tag.kind is DomainKind.ANNULUS
    assert all(tag.is_dirichlet for tag in annulus.boundary_tags)


def test_fem_resolution_help_matches_the_builders(capsys):
    assert main(['fem', '--help']) == EXIT_OK
    text = ' '.join(capsys.readouterr().out.split())
    assert 'cells along the first rectangle side' in text
    assert 'outer diameter of a disk or annulus' in text
    rectangle = load_mesh('builtin:rectangle:2:1', 16)
    assert len(set(rectangle.vertices[:, 0].round(12))) == 17
