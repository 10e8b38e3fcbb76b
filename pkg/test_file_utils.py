"""
Tests for mesh files, sweep configuration files, sweep tables and plots
"""
import math

import numpy as np
import pytest

from utils.core_types import BoundaryOperator, ConfigError, InvalidMesh
from utils.file_utils import (
    CSV_COLUMNS,
    build_sweep_spec,
    parse_sweep_config,
    read_mesh,
    read_sweep_config,
    read_sweep_csv,
    validate_file,
    write_mesh,
    write_sweep_csv,
)
from utils.fit_utils import fit_rate
from utils.mesh_utils import DomainKind, mesh_annulus, mesh_rectangle
from utils.plot_utils import plot_sweep_svg
from utils.sweep_utils import SweepFamily, SweepResult, SweepRow, SweepSpec, run_sweep

D = BoundaryOperator.dirichlet()
R = BoundaryOperator.robin

SQUARE = """\
# two triangles
VERTICES
0 0
1 0
1 1
0 1
TRIANGLES
0 1 2
0 2 3   # counter-clockwise
BOUNDARY
0 1 D
1 2 N
2 3 R 1.5
3 0 R -2
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_read_mesh(tmp_path):
    mesh = read_mesh(_write(tmp_path, 'square.mesh', SQUARE))
    assert mesh.n_vertices == 4
    assert mesh.n_triangles == 2
    assert mesh.domain_tag.kind is DomainKind.IMPORTED
    assert mesh.boundary_tags == (D, BoundaryOperator.neumann(), R(1.5), R(-2.0))


def test_clockwise_triangles_are_reoriented(tmp_path):
    mesh = read_mesh(_write(tmp_path, 'square.mesh', SQUARE.replace('0 2 3', '0 3 2')))
    assert mesh.n_triangles == 2


def test_mesh_round_trip(tmp_path):
    for original in (mesh_rectangle(1.0, 2.0, 8, R(0.1)), mesh_annulus(0.5, 1.0, 16, D)):
        path = str(tmp_path / 'out.mesh')
        write_mesh(original, path)
        copy = read_mesh(path)
        np.testing.assert_array_equal(copy.vertices, original.vertices)
        np.testing.assert_array_equal(copy.triangles, original.triangles)
        assert copy.boundary_tags == original.boundary_tags


@pytest.mark.parametrize("text,line", [
    ("0 0\nVERTICES\n", 1),
    ("VERTICES\n0 0\n1 0 5\n", 3),
    ("VERTICES\n0 0\n1 x\n", 3),
    ("VERTICES\n0 0\n1 0\n0 1\nTRIANGLES\n0 1 2\nBOUNDARY\n0 1 Q\n", 8),
    ("VERTICES\n0 0\n1 0\n0 1\nTRIANGLES\n0 1 2\nBOUNDARY\n0 1 R\n", 8),
    ("VERTICES\n0 0\nnan 0\n", 3),
])
def test_mesh_parse_errors_carry_line_numbers(tmp_path, text, line):
    path = _write(tmp_path, 'bad.mesh', text)
    with pytest.raises(InvalidMesh, match=f":{line}:"):
        read_mesh(path)


def test_mesh_structural_errors(tmp_path):
    with pytest.raises(InvalidMesh):
        read_mesh(_write(tmp_path, 'missing.mesh', SQUARE.replace('3 0 R -2\n', '')))
    with pytest.raises(InvalidMesh):
        read_mesh(_write(tmp_path, 'range.mesh', SQUARE.replace('0 2 3', '0 2 7')))
    with pytest.raises(InvalidMesh):
        read_mesh(_write(tmp_path, 'empty.mesh', "VERTICES\n0 0\n"))
    with pytest.raises(InvalidMesh):
        read_mesh(str(tmp_path / 'absent.mesh'))
    with pytest.raises(InvalidMesh):
        read_mesh(_write(tmp_path, 'square.obj', SQUARE))


def test_validate_file(tmp_path):
    path = _write(tmp_path, 'a.cfg', '')
    assert validate_file(path, {'.cfg'}) == (True, None)
    valid, error = validate_file(path, {'.mesh'})
    assert not valid and 'Invalid file type' in error
    valid, error = validate_file('', {'.cfg'})
    assert not valid


def test_sweep_config(tmp_path):
    text = """
    # Dirichlet interval
    family = interval
    left = D
    right = R
    beta_right = 2.5
    start = 1
    factor = 0.5
    count = 5
    eig_rel_tol = 1e-9
    output = results/dd.csv
    """
    spec, output, svg = read_sweep_config(_write(tmp_path, 'dd.cfg', text))
    assert spec.family is SweepFamily.INTERVAL
    assert spec.left == D and spec.right == R(2.5)
    assert spec.grid == [1.0, 0.5, 0.25, 0.125, 0.0625]
    assert spec.tol.eig_rel_tol == 1e-9
    assert output == 'results/dd.csv'
    assert svg is None


def test_bare_beta_means_robin():
    spec, _, _ = build_sweep_spec(parse_sweep_config(
        "family = ball\nbeta = -1\ndimension = 3\nstart = 1\nfactor = 0.5\ncount = 4"))
    assert spec.boundary == R(-1.0)
    assert spec.dimension == 3
    assert spec.quantity == 'scaled'


def test_exploratory_config():
    spec, _, _ = build_sweep_spec(parse_sweep_config(
        "family = disk\nexploratory_beta = 1 -3\nstart = 1\nfactor = 0.5\ncount = 3"))
    assert spec.exploratory_beta == (1.0, -3.0)


@pytest.mark.parametrize("text,match", [
    ("family interval", ":1:"),
    ("colour = red", "unknown key"),
    ("start = 1\nstart = 2", "twice"),
])
def test_sweep_config_parse_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_sweep_config(text)


@pytest.mark.parametrize("text", [
    "family = cube\nstart = 1\nfactor = 0.5\ncount = 4",
    "family = interval\nleft = D\nright = D\nfactor = 0.5\ncount = 4",
    "family = interval\nleft = D\nright = D\nstart = one\nfactor = 0.5\ncount = 4",
    "family = interval\nleft = D\nright = R\nstart = 1\nfactor = 0.5\ncount = 4",
    "family = disk\nexploratory_beta = 1\nstart = 1\nfactor = 0.5\ncount = 4",
])
def test_sweep_config_build_errors(text):
    with pytest.raises(ConfigError):
        build_sweep_spec(parse_sweep_config(text))


def _interval_result():
    return run_sweep(SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 5, left=D, right=R(1.0)), max_workers=2)


def test_sweep_csv_round_trip_and_determinism(tmp_path):
    result = _interval_result()
    first, second = tmp_path / 'a.csv', tmp_path / 'nested' / 'b.csv'
    write_sweep_csv(result, str(first), timings=False)
    write_sweep_csv(result, str(second), timings=False)
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().splitlines()[0] == ','.join(CSV_COLUMNS)

    rows = read_sweep_csv(str(first))
    assert [row.sigma for row in rows] == [row.sigma for row in result.rows]
    assert [row.scale for row in rows] == [row.scale for row in result.rows]
    assert all(row.method == 'TranscendentalRoot' for row in rows)


def test_flagged_rows_are_written_empty(tmp_path):
    spec = SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 4, left=D, right=D)
    rows = [SweepRow(s, math.pi ** 2 / s ** 2, 0.0, 'ClosedForm') for s in spec.grid[:3]]
    rows.append(SweepRow(spec.grid[3], math.nan, math.nan, 'exact', 1.0, False, 'NoSignChange: synthetic'))
    result = SweepResult(spec, tuple(rows), fit_rate(rows))
    path = str(tmp_path / 'flagged.csv')
    write_sweep_csv(result, path)
    back = read_sweep_csv(path)
    assert not back[-1].converged
    assert all(row.converged for row in back[:3])


def test_csv_with_wrong_columns(tmp_path):
    with pytest.raises(ConfigError):
        read_sweep_csv(_write(tmp_path, 'x.csv', "a,b\n1,2\n"))


def test_svg_plot(tmp_path):
    result = _interval_result()
    first, second = tmp_path / 'a.svg', tmp_path / 'b.svg'
    plot_sweep_svg(result, str(first))
    plot_sweep_svg(result, str(second))
    assert first.read_bytes() == second.read_bytes()
    assert b'<svg' in first.read_bytes()
