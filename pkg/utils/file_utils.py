"""
File utilities for mesh files, sweep configuration files and sweep tables
"""
import csv
import logging
import math
import os

import numpy as np

from config.config import Config
from utils.core_types import BoundaryOperator, ConfigError, InvalidMesh, TolerancePolicy
from utils.mesh_utils import DomainKind, DomainTag, Mesh2D, orient_triangles, validate_mesh
from utils.sweep_utils import SweepFamily, SweepRow, SweepSpec

logger = logging.getLogger(__name__)

MESH_SECTIONS = ('VERTICES', 'TRIANGLES', 'BOUNDARY')
CSV_COLUMNS = ['scale', 'sigma', 'residual', 'method', 'wall_ms']


def validate_file(path, allowed_extensions):
    """
    Validate an input file path

    Args:
        path: File path
        allowed_extensions: Set of allowed file extensions

    Returns:
        tuple: (is_valid, error_message)
    """
    if not path:
        return False, "No file given"

    file_ext = os.path.splitext(str(path))[1].lower()
    if file_ext not in allowed_extensions:
        return False, f"Invalid file type. Allowed: {', '.join(sorted(allowed_extensions))}"

    if not os.path.isfile(path):
        return False, f"File not found: {path}"

    return True, None


def _strip(line):
    return line.split('#', 1)[0].strip()


def read_mesh(path):
    """
    Read a plain-text mesh

    The file holds three sections, each opened by its keyword on a line of
    its own: VERTICES (x y), TRIANGLES (i j k) and BOUNDARY (i j kind [beta]).
    Indices are 0-based, kind is D, N or R, and '#' starts a comment.

    Args:
        path: Mesh file path

    Returns:
        Mesh2D tagged Imported

    Raises:
        InvalidMesh: On a malformed line (with its line number) or a mesh
            failing validation
    """
    is_valid, error = validate_file(path, Config.ALLOWED_MESH_EXTENSIONS)
    if not is_valid:
        raise InvalidMesh(error)

    vertices, triangles, edges, tags = [], [], [], []
    section = None
    with open(path, 'r', encoding='utf-8') as f:
        for number, raw in enumerate(f, start=1):
            line = _strip(raw)
            if not line:
                continue
            if line.upper() in MESH_SECTIONS:
                section = line.upper()
                continue
            fields = line.split()
            try:
                if section == 'VERTICES' and len(fields) == 2:
                    point = [float(v) for v in fields]
                    if not all(math.isfinite(v) for v in point):
                        raise ValueError("non-finite coordinate")
                    vertices.append(point)
                elif section == 'TRIANGLES' and len(fields) == 3:
                    triangles.append([int(v) for v in fields])
                elif section == 'BOUNDARY' and len(fields) in (3, 4):
                    edges.append([int(fields[0]), int(fields[1])])
                    tags.append(BoundaryOperator.parse(fields[2], fields[3] if len(fields) == 4 else None))
                elif section is None:
                    raise ValueError("data before the first section keyword")
                else:
                    raise ValueError(f"unexpected field count {len(fields)} in {section}")
            except ValueError as e:
                raise InvalidMesh(f"{path}:{number}: {e}") from e

    if not vertices or not triangles or not edges:
        raise InvalidMesh(f"{path}: every section must be present and non-empty")
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    if triangles.min() < 0 or triangles.max() >= len(vertices):
        raise InvalidMesh(f"{path}: triangle index out of range")
    mesh = Mesh2D(vertices, orient_triangles(vertices, triangles), np.asarray(edges, dtype=np.int64),
                  tuple(tags), DomainTag(DomainKind.IMPORTED))
    validate_mesh(mesh)
    logger.info(f"Read {mesh!r} from {path}")
    return mesh


def _format_tag(tag):
    if tag.is_dirichlet:
        return 'D'
    if tag.beta == 0.0:
        return 'N'
    return f"R {tag.beta:.17g}"


def write_mesh(mesh, path):
    """Write a mesh in the grammar read_mesh accepts"""
    with open(path, 'w', encoding='utf-8') as f:
        f.write(f"# {mesh!r}\n")
        f.write("VERTICES\n")
        for x, y in mesh.vertices:
            f.write(f"{x:.17g} {y:.17g}\n")
        f.write("TRIANGLES\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")
        f.write("BOUNDARY\n")
        for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            f.write(f"{i} {j} {_format_tag(tag)}\n")
    logger.info(f"Wrote {mesh!r} to {path}")


SWEEP_KEYS = {
    'family', 'left', 'right', 'beta_left', 'beta_right', 'dimension', 'beta', 'boundary',
    'start', 'factor', 'count', 'solver', 'resolution', 'steps', 'quantity',
    'root_abs_tol', 'eig_rel_tol', 'max_iterations', 'output', 'svg', 'exploratory_beta',
}


def parse_sweep_config(text, source='<config>'):
    """
    Parse `key = value` lines; '#' comments and blank lines are ignored

    Returns:
        dict: Raw string values keyed by lower-case key

    Raises:
        ConfigError: On a malformed line, an unknown key or a repeated key
    """
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"{source}:{number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.lower()
        if key not in SWEEP_KEYS:
            raise ConfigError(f"{source}:{number}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{source}:{number}: key '{key}' given twice")
        values[key] = value
    return values


def _number(values, key, kind=float, default=None):
    if key not in values:
        if default is None:
            raise ConfigError(f"Missing required key '{key}'")
        return default
    try:
        return kind(values[key])
    except ValueError as e:
        raise ConfigError(f"Invalid value for '{key}': {values[key]}") from e


def build_sweep_spec(values):
    """
    SweepSpec from parsed config values

    Returns:
        tuple: (SweepSpec, output_path or None, svg_path or None)
    """
    try:
        family = SweepFamily(values.get('family', '').lower())
    except ValueError as e:
        raise ConfigError(f"Unknown family '{values.get('family')}'; "
                          f"choose from {', '.join(f.value for f in SweepFamily)}") from e

    def operator(kind_key, beta_key):
        kind = values.get(kind_key)
        if kind is None:
            return None
        return BoundaryOperator.parse(kind, values.get(beta_key))

    left = operator('left', 'beta_left')
    right = operator('right', 'beta_right')
    boundary = operator('boundary', 'beta')
    if boundary is None and 'beta' in values:
        boundary = BoundaryOperator.parse('R', values['beta'])

    exploratory = None
    if 'exploratory_beta' in values:
        parts = values['exploratory_beta'].split()
        if len(parts) != 2:
            raise ConfigError("exploratory_beta takes two numbers: a b (beta = a + b x)")
        try:
            exploratory = (float(parts[0]), float(parts[1]))
        except ValueError as e:
            raise ConfigError(f"Invalid exploratory_beta: {values['exploratory_beta']}") from e

    base = TolerancePolicy.from_config() if family is SweepFamily.INTERVAL and values.get(
        'solver', 'exact') == 'exact' else TolerancePolicy.for_discretization()
    tol = base.with_overrides(
        root_abs_tol=_number(values, 'root_abs_tol', float, base.root_abs_tol),
        eig_rel_tol=_number(values, 'eig_rel_tol', float, base.eig_rel_tol),
        max_iterations=_number(values, 'max_iterations', int, base.max_iterations),
    )
    spec = SweepSpec(
        family=family,
        start=_number(values, 'start'),
        factor=_number(values, 'factor'),
        count=_number(values, 'count', int),
        left=left,
        right=right,
        boundary=boundary,
        dimension=_number(values, 'dimension', int, 2),
        solver=values.get('solver'),
        resolution=_number(values, 'resolution', int, 0),
        steps=_number(values, 'steps', int, 0),
        tol=tol,
        quantity=values.get('quantity'),
        exploratory_beta=exploratory,
    )
    return spec, values.get('output'), values.get('svg')


def read_sweep_config(path):
    """
    Read a sweep configuration file

    Returns:
        tuple: (SweepSpec, output_path or None, svg_path or None)
    """
    is_valid, error = validate_file(path, Config.ALLOWED_CONFIG_EXTENSIONS)
    if not is_valid:
        raise ConfigError(error)
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    return build_sweep_spec(parse_sweep_config(text, str(path)))


def _cell(value, digits):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ''
    return f"{value:.{digits}g}"


def write_sweep_csv(result, path, timings=True):
    """
    Write sweep rows as CSV with 17 significant digits

    Args:
        result: SweepResult
        path: Output path
        timings: Write wall_ms; False leaves the column empty so repeated
            runs produce identical bytes
    """
    digits = Config.CSV_DIGITS
    directory = os.path.dirname(str(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow([
                _cell(row.scale, digits),
                _cell(row.sigma, digits),
                _cell(row.residual, digits),
                row.method,
                _cell(row.wall_ms, digits) if timings else '',
            ])
    logger.info(f"Wrote {len(result.rows)} sweep rows to {path}")


def read_sweep_csv(path):
    """
    Read a sweep table written by write_sweep_csv

    Returns:
        list of SweepRow; rows with an empty sigma are flagged not converged
    """
    def parse(cell):
        return float(cell) if cell != '' else math.nan

    rows = []
    with open(path, 'r', newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_COLUMNS:
            raise ConfigError(f"{path}: expected columns {', '.join(CSV_COLUMNS)}")
        for record in reader:
            sigma = parse(record['sigma'])
            wall = parse(record['wall_ms'])
            rows.append(SweepRow(parse(record['scale']), sigma, parse(record['residual']),
                                 record['method'], 0.0 if math.isnan(wall) else wall,
                                 not math.isnan(sigma)))
    return rows
