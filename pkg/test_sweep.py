"""
Tests for parameter sweeps and their fitted trends
"""
import math

import numpy as np
import pytest

from utils import sweep_utils
from utils.core_types import BoundaryOperator, ConfigError, FitFailure, NoSignChange
from utils.fit_utils import ModelKind
from utils.sweep_utils import SweepFamily, SweepSpec, run_sweep, scaled_products

D = BoundaryOperator.dirichlet()
N = BoundaryOperator.neumann()
R = BoundaryOperator.robin


def test_grid_is_geometric():
    spec = SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 4, left=D, right=D)
    assert spec.grid == [1.0, 0.5, 0.25, 0.125]
    assert spec.solver == 'exact'
    assert spec.quantity == 'sigma'


def test_antisymmetric_pair_is_constant():
    spec = SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 6, left=R(3.0), right=R(-3.0))
    result = run_sweep(spec, max_workers=2)
    assert result.model.kind is ModelKind.CONSTANT
    assert result.model.params['c'] == pytest.approx(-9.0, abs=1e-12)
    assert [row.scale for row in result.rows] == spec.grid


def test_dirichlet_interval_power_law():
    spec = SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 6, left=D, right=D)
    result = run_sweep(spec)
    assert result.model.kind is ModelKind.POWER_LAW
    assert result.model.params['p'] == pytest.approx(-2.0, abs=1e-6)
    assert result.model.params['C'] == pytest.approx(math.pi ** 2, rel=1e-6)
    assert result.model.divergence == 1
    np.testing.assert_allclose(scaled_products(result, 2), math.pi ** 2, rtol=1e-9)


def test_tridiag_interval_sweep():
    spec = SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 4, left=N, right=D, solver='tridiag', resolution=512)
    result = run_sweep(spec)
    assert all(row.method == 'Tridiagonal' for row in result.rows)
    assert result.model.kind is ModelKind.POWER_LAW
    assert result.model.params['p'] == pytest.approx(-2.0, abs=1e-3)


def test_ball_scaled_quantity_is_linear():
    spec = SweepSpec(SweepFamily.BALL, 0.1, 0.5, 6, boundary=R(1.0), dimension=2, steps=1024)
    assert spec.quantity == 'scaled'
    result = run_sweep(spec)
    assert result.model.kind is ModelKind.LINEAR
    assert result.model.params['slope'] == pytest.approx(2.0, rel=1e-2)


def test_failed_points_are_flagged(monkeypatch):
    spec = SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 5, left=D, right=D)
    original = sweep_utils.evaluate_point

    def flaky(sweep, scale):
        if scale == 0.25:
            raise NoSignChange("synthetic failure")
        return original(sweep, scale)

    monkeypatch.setattr(sweep_utils, 'evaluate_point', flaky)
    result = run_sweep(spec)
    flagged = [row for row in result.rows if not row.converged]
    assert len(flagged) == 1
    assert flagged[0].scale == 0.25
    assert math.isnan(flagged[0].sigma)
    assert flagged[0].message.startswith('NoSignChange')
    assert len(result.converged_rows) == 4
    assert result.model.kind is ModelKind.POWER_LAW


def test_too_many_failures(monkeypatch):
    def broken(sweep, scale):
        raise NoSignChange("synthetic failure")

    monkeypatch.setattr(sweep_utils, 'evaluate_point', broken)
    with pytest.raises(FitFailure):
        run_sweep(SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 4, left=D, right=D))


def test_exploratory_field():
    spec = SweepSpec(SweepFamily.SQUARE, 1.0, 0.5, 3, exploratory_beta=(1.0, -2.0))
    beta = spec.exploratory_field(0.5)
    assert beta(0.25, 0.0) == pytest.approx(0.0)
    assert 'exploratory' in spec.describe()


@pytest.mark.parametrize("kwargs", [
    dict(family=SweepFamily.INTERVAL, start=1.0, factor=0.5, count=4, left=D),
    dict(family=SweepFamily.INTERVAL, start=-1.0, factor=0.5, count=4, left=D, right=D),
    dict(family=SweepFamily.INTERVAL, start=1.0, factor=1.5, count=4, left=D, right=D),
    dict(family=SweepFamily.INTERVAL, start=1.0, factor=0.5, count=2, left=D, right=D),
    dict(family=SweepFamily.BALL, start=1.0, factor=0.5, count=4),
    dict(family=SweepFamily.BALL, start=1.0, factor=0.5, count=4, boundary=D, solver='fem'),
    dict(family=SweepFamily.SQUARE, start=1.0, factor=0.5, count=4, boundary=D, quantity='scaled'),
    dict(family=SweepFamily.BALL, start=1.0, factor=0.5, count=4, exploratory_beta=(1.0, 1.0)),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigError):
        SweepSpec(**kwargs)
