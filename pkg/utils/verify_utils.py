"""
Verification suite: every quantitative property of the solvers checked at
desk scale, aggregated into a pass/fail report
"""
import filecmp
import logging
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

from config.config import Config
from utils.core_types import BoundaryOperator, Problem1D, TolerancePolicy
from utils.exact1d_utils import (
    dirichlet_value,
    principal_eigenvalue_1d,
    small_length_rate,
)
from utils.fem_utils import (
    assemble_fem,
    dirichlet_square_value,
    interior_vertices,
    principal_eigenvalue_fem,
    smallest_eig_sparse,
)
from utils.file_utils import read_sweep_csv, write_sweep_csv
from utils.fit_utils import ModelKind, convergence_order, fit_rate
from utils.geometry_utils import (
    annulus_geometry,
    ball_geometry,
    isoperimetric_check,
    mesh_geometry,
    monte_carlo_ball_volume,
    omega_n,
    rectangle_geometry,
)
from utils.mesh_utils import boundary_loops, mesh_annulus, mesh_disk, mesh_rectangle
from utils.radial_utils import (
    BallProblem,
    asymptotic_slope,
    expansion_coefficients,
    principal_eigenvalue_ball,
    sigma_dot_formula,
    sigma_scaled,
)
from utils.sweep_utils import SweepFamily, SweepSpec, run_sweep
from utils.tridiag_utils import assemble_1d, principal_eigenvalue_tridiag, smallest_eig_tridiag

logger = logging.getLogger(__name__)

D = BoundaryOperator.dirichlet()
N = BoundaryOperator.neumann()
R = BoundaryOperator.robin

BESSEL_J0_FIRST_ZERO_SQUARED = 5.783185962946784
SEED = 20240601


class Outcome(NamedTuple):
    passed: bool
    margin: float
    detail: str


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str
    seconds: float
    strict: bool = False


@dataclass
class VerificationReport:
    results: List[CheckResult]
    tol: TolerancePolicy
    discrete_tol: TolerancePolicy
    fast: bool = False
    robin_sign: float = 1.0

    @property
    def passed(self):
        return all(result.passed for result in self.results)

    @property
    def failures(self):
        return [result for result in self.results if not result.passed]

    def render(self):
        """Plain-text pass/fail table with measured margins"""
        width = max([len(r.name) for r in self.results] + [5])
        lines = [f"{'check':<{width}}  status  {'margin':>12}  {'seconds':>8}  detail",
                 '-' * (width + 50)]
        for r in self.results:
            status = 'PASS' if r.passed else 'FAIL'
            name = r.name + ('*' if r.strict else '')
            lines.append(f"{name:<{width + 1}} {status:<6}  {r.margin:>12.4g}  {r.seconds:>8.2f}  {r.detail}")
        lines.append('-' * (width + 50))
        lines.append(f"{len(self.results) - len(self.failures)}/{len(self.results)} checks passed"
                     f"{' (fast mode)' if self.fast else ''}")
        lines.append("* strict inequality; margin is the observed gap")
        default = TolerancePolicy.for_discretization()
        if self.discrete_tol.eig_rel_tol > default.eig_rel_tol:
            lines.append(f"eig_rel_tol widened to {self.discrete_tol.eig_rel_tol:g}; "
                         f"margins of strict comparisons are only meaningful above this level")
        if self.robin_sign != 1.0:
            lines.append(f"Robin boundary term multiplied by {self.robin_sign:g} in the FEM assembly")
        return '\n'.join(lines)


@dataclass(frozen=True)
class VerifyContext:
    tol: TolerancePolicy
    discrete_tol: TolerancePolicy
    fast: bool = False
    robin_sign: float = 1.0
    steps: int = 4096
    fem_resolution: int = 64

    def battery(self, full, fast):
        return fast if self.fast else full

    def rng(self, offset=0):
        return np.random.default_rng(SEED + offset)

    def exact(self, length, left, right):
        return principal_eigenvalue_1d(Problem1D(length, left, right), self.tol).value

    def ball(self, dimension, radius, boundary, rescale=True):
        return principal_eigenvalue_ball(BallProblem(dimension, radius, boundary), self.discrete_tol,
                                         self.steps, rescale).value

    def fem(self, mesh, beta=None):
        return principal_eigenvalue_fem(mesh, beta, self.discrete_tol, self.robin_sign)


def _summary(margins, labels, strict=False):
    """Outcome from per-case margins; a case passes at margin >= 0 (> 0 when strict)"""
    margins = np.asarray(margins, dtype=float)
    worst = int(np.argmin(margins))
    passed = bool(np.all(margins > 0) if strict else np.all(margins >= 0))
    return Outcome(passed, float(margins[worst]), f"{len(margins)} cases, worst: {labels[worst]}")


def _random_operator(rng, dirichlet=0.15, neumann=0.15, low=-3.0, high=3.0):
    u = rng.random()
    if u < dirichlet:
        return D
    if u < dirichlet + neumann:
        return N
    return R(float(rng.uniform(low, high)))


def check_closed_forms(ctx):
    margins, labels = [], []
    for length in (0.1, 1.0, 10.0):
        for left, right, expected in ((D, D, (math.pi / length) ** 2),
                                      (D, N, (math.pi / (2 * length)) ** 2),
                                      (N, D, (math.pi / (2 * length)) ** 2)):
            value = ctx.exact(length, left, right)
            margins.append(1e-12 - abs(value - expected) / expected)
            labels.append(f"({left}, {right}, L={length:g})")
    for left, right, expected in ((R(1.0), D, 4.115858365), (R(-1.0), N, -1.439229107),
                                  (N, N, 0.0), (R(3.0), R(-3.0), -9.0)):
        value = ctx.exact(1.0, left, right)
        margins.append(5e-9 - abs(value - expected))
        labels.append(f"({left}, {right}, L=1) = {value:.10g}")
    return _summary(margins, labels)


def check_antisymmetric_pair_constant(ctx):
    margins, labels = [], []
    for b0 in (0.5, 1.0, 3.0):
        for length in (1e-3, 1.0, 1e3):
            for left, right in ((R(b0), R(-b0)), (R(-b0), R(b0))):
                value = ctx.exact(length, left, right)
                margins.append(1e-10 - abs(value + b0 * b0))
                labels.append(f"({left}, {right}, L={length:g}) = {value:.12g}")
    return _summary(margins, labels)


def check_small_length_rates(ctx):
    margins, labels = [], []
    pairs = ((R(1.0), R(2.0)), (R(2.0), R(-0.5)), (R(-1.0), N), (R(-2.0), R(1.0)), (N, R(3.0)))
    for left, right in pairs:
        total = left.beta + right.beta
        value = ctx.exact(1e-5, left, right)
        margins.append(0.01 - abs(value * 1e-5 / total - 1.0))
        labels.append(f"sigma*L for ({left}, {right}) at L=1e-5: {value * 1e-5:.6g} vs {total:g}")
        at = ctx.exact(1e-4, left, right)
        margins.append((at - 1e3) / 1e3 if total > 0 else (-1e3 - at) / 1e3)
        labels.append(f"({left}, {right}) at L=1e-4: {at:.6g}")

    for left, right in ((R(1.0), D), (D, R(-0.5))):
        spec = SweepSpec(SweepFamily.INTERVAL, 1e-3, 0.5, ctx.battery(10, 6), left=left, right=right,
                         tol=ctx.tol)
        model = run_sweep(spec, max_workers=2).model
        rate = small_length_rate(left, right)
        if model.kind is not ModelKind.POWER_LAW:
            margins.append(-1.0)
            labels.append(f"({left}, {right}) fitted {model}, expected a power law")
            continue
        margins.append(1e-3 - abs(model.params['p'] - rate.exponent))
        labels.append(f"({left}, {right}) exponent {model.params['p']:.6g}")
        margins.append(5e-3 - abs(model.params['C'] / rate.coefficient - 1.0))
        labels.append(f"({left}, {right}) coefficient {model.params['C']:.6g}")
    return _summary(margins, labels)


def check_zero_eigenvalue_manifolds(ctx):
    rng = ctx.rng(1)
    worst, label = 0.0, 'all exactly zero'
    count = 50
    for _ in range(count):
        b0 = float(rng.uniform(0.1, 3.0))
        length = float(rng.uniform(0.1, 5.0))
        bl = -b0 / (b0 * length + 1.0)
        for left, right in ((R(b0), R(bl)), (R(-1.0 / length), D), (D, R(-1.0 / length))):
            value = ctx.exact(length, left, right)
            if abs(value) > worst:
                worst, label = abs(value), f"({left}, {right}, L={length:.6g}) = {value:.3g}"
    return Outcome(worst == 0.0, -worst, f"{3 * count} cases, {label}")


def check_tridiagonal_oracle(ctx):
    rng = ctx.rng(2)
    margins, labels = [], []
    for _ in range(ctx.battery(200, 40)):
        length = float(rng.uniform(0.2, 5.0))
        left, right = _random_operator(rng), _random_operator(rng)
        exact = ctx.exact(length, left, right)
        discrete = principal_eigenvalue_tridiag(Problem1D(length, left, right), 4096, ctx.discrete_tol).value
        margins.append(5e-4 * (1.0 + abs(exact)) - abs(discrete - exact))
        labels.append(f"({left}, {right}, L={length:.4g}): {discrete:.8g} vs {exact:.8g}")

    pairs = []
    for n in (64, 128, 256, 512):
        estimate = smallest_eig_tridiag(assemble_1d(Problem1D(1.0, D, D), n), ctx.discrete_tol)
        pairs.append((1.0 / n, estimate.value))
    order = convergence_order(pairs)
    margins.append(0.1 - abs(order - 2.0))
    labels.append(f"convergence order {order:.4f}")

    radial = principal_eigenvalue_tridiag(Problem1D(1.0, N, D, radial_dimension=2), 2048, ctx.discrete_tol)
    margins.append(1e-3 - abs(radial.value - BESSEL_J0_FIRST_ZERO_SQUARED))
    labels.append(f"radial N=2 Dirichlet {radial.value:.8g}")
    return _summary(margins, labels)


def check_disk_fem_vs_shooting(ctx):
    margins, labels = [], []
    radii = ctx.battery((0.5, 1.0, 2.0), (1.0,))
    for beta in (-2.0, -0.5, 0.5, 2.0):
        for radius in radii:
            radial = ctx.ball(2, radius, R(beta))
            fem = ctx.fem(mesh_disk(radius, 64, R(beta))).value
            gap = abs(fem - radial) / abs(radial)
            margins.append(0.01 - gap)
            labels.append(f"beta={beta:g}, R={radius:g} at 64: gap {gap:.3%}")
            if not ctx.fast and radius == 1.0:
                fine = ctx.fem(mesh_disk(radius, 128, R(beta))).value
                gap = abs(fine - radial) / abs(radial)
                margins.append(0.003 - gap)
                labels.append(f"beta={beta:g}, R={radius:g} at 128: gap {gap:.3%}")
    return _summary(margins, labels)


def check_ball_exceeds_interval(ctx):
    rng = ctx.rng(3)
    margins, labels = [], []
    for _ in range(ctx.battery(6, 3)):
        dimension = int(rng.integers(2, 4))
        radius = float(rng.uniform(0.2, 3.0))
        beta = float(rng.uniform(0.2, 3.0))
        ball = ctx.ball(dimension, radius, R(beta))
        interval = ctx.exact(radius, N, R(beta))
        margins.append(ball - interval)
        labels.append(f"N={dimension}, R={radius:.4g}, beta={beta:.4g}: {ball:.8g} > {interval:.8g}")
    return _summary(margins, labels, strict=True)


def _disk_and_square(ctx, beta, measure, resolution):
    radius = math.sqrt(measure / math.pi)
    side = math.sqrt(measure)
    disk = ctx.fem(mesh_disk(radius, resolution, R(beta))).value
    square = ctx.fem(mesh_rectangle(side, side, resolution, R(beta))).value
    return disk, square


def check_faber_krahn(ctx):
    margins, labels = [], []
    resolution = ctx.fem_resolution
    measures = ctx.battery((math.pi / 4, math.pi, 4 * math.pi), (math.pi,))
    for beta in (0.5, 1.0, 2.0):
        for measure in measures:
            disk, square = _disk_and_square(ctx, beta, measure, resolution)
            coarse_disk, coarse_square = _disk_and_square(ctx, beta, measure, resolution // 2)
            slack = abs(disk - coarse_disk) + abs(square - coarse_square)
            margins.append(square + 2.0 * slack - disk)
            labels.append(f"beta={beta:g}, |Omega|={measure:.4g}: disk {disk:.6g} vs square {square:.6g}")
            if not ctx.fast and measure == math.pi:
                fine_disk, fine_square = _disk_and_square(ctx, beta, measure, 128)
                margins.append(fine_square - fine_disk)
                labels.append(f"beta={beta:g} strict at 128: {fine_disk:.6g} < {fine_square:.6g}")
    return _summary(margins, labels, strict=True)


def check_negative_robin_upper_bound(ctx):
    margins, labels, rows = [], [], []
    resolution = max(16, ctx.fem_resolution // 2)
    for side in (1.0, 0.5, 0.25, 0.125):
        value = ctx.fem(mesh_rectangle(side, side, resolution, R(-1.0))).value
        bound = rectangle_geometry(side, side).ratio * -1.0
        margins.append(bound - value)
        labels.append(f"side {side:g}: {value:.6g} < {bound:.6g}")
        rows.append((side, value))
    model = fit_rate(rows)
    margins.append(1.0 if model.divergence == -1 else -1.0)
    labels.append(f"trend {model} with divergence {model.divergence:+d}")
    return _summary(margins, labels, strict=True)


def check_shrinking_square_blowup(ctx):
    margins, labels = [], []
    sides = [2.0 ** -k for k in range(6)]
    for beta in (1.0, -1.0):
        values = [ctx.fem(mesh_rectangle(a, a, 16, R(beta))).value for a in sides]
        steps = np.diff(values) * beta
        margins.append(float(np.min(steps)))
        labels.append(f"beta={beta:g}: monotone trend, smallest step {np.min(steps):.4g}")
        margins.append((values[-1] - 1e2) if beta > 0 else (-1e2 - values[-1]))
        labels.append(f"beta={beta:g}: sigma at side 2^-5 = {values[-1]:.6g}")
        ceiling = dirichlet_square_value(sides[-1])
        margins.append(ceiling - values[-1])
        labels.append(f"beta={beta:g}: below the Dirichlet ceiling {ceiling:.6g}")
        rate = values[-1] * sides[-1] / (4.0 * beta)
        margins.append(0.1 - abs(rate - 1.0))
        labels.append(f"beta={beta:g}: sigma*side/(4 beta) = {rate:.4g}")
        model = fit_rate(list(zip(sides, values)))
        margins.append(1.0 if model.divergence == int(beta) else -1.0)
        labels.append(f"beta={beta:g}: trend {model}")
    return _summary(margins, labels, strict=True)


def check_scaled_eigenvalue_slope(ctx):
    margins, labels = [], []
    cases = ctx.battery(((1, 1.0), (2, 1.0), (2, 3.0), (3, 1.0)), ((1, 1.0), (2, 1.0)))
    radii = np.array([1e-2 * 2.0 ** -k for k in range(ctx.battery(7, 5))])
    for dimension, beta in cases:
        slope = asymptotic_slope(dimension, beta)
        small = sigma_scaled(dimension, 1e-3, beta, ctx.discrete_tol, ctx.steps)
        margins.append(0.01 - abs(small / 1e-3 / slope - 1.0))
        labels.append(f"N={dimension}, beta={beta:g}: Sigma(1e-3)/1e-3 = {small / 1e-3:.6g}")

        values = np.array([sigma_scaled(dimension, r, beta, ctx.discrete_tol, ctx.steps) for r in radii])
        c2, c1, c0 = np.polyfit(radii, values, 2)
        margins.append(1e-6 - abs(c0))
        labels.append(f"N={dimension}, beta={beta:g}: intercept {c0:.3g}")
        margins.append(5e-3 - abs(c1 / slope - 1.0))
        labels.append(f"N={dimension}, beta={beta:g}: slope {c1:.6g}")
        remainder = values - slope * radii
        if np.all(remainder > 0) or np.all(remainder < 0):
            order, _ = np.polyfit(np.log(radii), np.log(np.abs(remainder)), 1)
            margins.append(0.2 - abs(order - 2.0))
            labels.append(f"N={dimension}, beta={beta:g}: remainder exponent {order:.4f}")
        else:
            margins.append(-1.0)
            labels.append(f"N={dimension}, beta={beta:g}: remainder changes sign")
    return _summary(margins, labels)


def check_expansion_coefficients(ctx):
    radii = [1e-2 * 2.0 ** -k for k in range(5)]
    c0, c1, _ = expansion_coefficients(2, 1.0, radii, ctx.discrete_tol, ctx.steps)
    margins = [1e-6 - abs(c0), 5e-3 - abs(c1 / 2.0 - 1.0)]
    labels = [f"intercept {c0:.3g}", f"slope {c1:.6g}"]
    return _summary(margins, labels)


def check_scaled_eigenvalue_derivative(ctx):
    margins, labels = [], []
    h = 1e-4
    dimensions = ctx.battery((1, 2, 3), (2,))
    radii = ctx.battery((0.0, 0.25, 0.5, 1.0), (0.0, 0.5))
    for dimension in dimensions:
        for radius in radii:
            formula = sigma_dot_formula(dimension, radius, 1.0, ctx.discrete_tol, ctx.steps)
            upper = sigma_scaled(dimension, radius + h, 1.0, ctx.discrete_tol, ctx.steps)
            lower = sigma_scaled(dimension, radius - h, 1.0, ctx.discrete_tol, ctx.steps)
            difference = (upper - lower) / (2.0 * h)
            margins.append(1e-3 * (1.0 + abs(formula)) - abs(formula - difference))
            labels.append(f"N={dimension}, R={radius:g}: formula {formula:.8g} vs difference {difference:.8g}")
    return _summary(margins, labels)


def _raised(rng, op):
    """An operator strictly above op in the monotone order (Dirichlet is the top)"""
    if rng.random() < 0.1:
        return D
    return R(op.beta + float(rng.uniform(0.05, 1.0)))


def check_monotonicity_endpoints(ctx):
    rng = ctx.rng(4)
    margins, labels = [], []
    for _ in range(ctx.battery(150, 40)):
        length = float(rng.uniform(0.1, 10.0))
        left, right = R(float(rng.uniform(-3, 3))), R(float(rng.uniform(-3, 3)))
        which = int(rng.integers(0, 3))
        left2 = _raised(rng, left) if which in (0, 2) else left
        right2 = _raised(rng, right) if which in (1, 2) else right
        low, high = ctx.exact(length, left, right), ctx.exact(length, left2, right2)
        margins.append(high - low - 1e-12)
        labels.append(f"L={length:.4g}: ({left}, {right}) {low:.10g} < ({left2}, {right2}) {high:.10g}")
    return _summary(margins, labels, strict=True)


def check_monotonicity_ball(ctx):
    margins, labels = [], []
    for dimension in (2, 3):
        for radius in ctx.battery((0.5, 1.0), (1.0,)):
            ladder = [R(-1.0), R(-0.5), R(0.5), R(1.0), D]
            values = [ctx.ball(dimension, radius, op) for op in ladder]
            for (a, va), (b, vb) in zip(zip(ladder, values), zip(ladder[1:], values[1:])):
                margins.append(vb - va)
                labels.append(f"N={dimension}, R={radius:g}: {a} {va:.8g} < {b} {vb:.8g}")
    return _summary(margins, labels, strict=True)


def check_monotonicity_fem(ctx):
    margins, labels = [], []
    ladder = [R(-1.0), N, R(1.0), R(2.0), D]
    values = [ctx.fem(mesh_rectangle(1.0, 1.0, 16, op)).value for op in ladder]
    for (a, va), (b, vb) in zip(zip(ladder, values), zip(ladder[1:], values[1:])):
        margins.append(vb - va)
        labels.append(f"unit square: {a} {va:.8g} < {b} {vb:.8g}")
    return _summary(margins, labels, strict=True)


def check_endpoint_symmetry(ctx):
    rng = ctx.rng(5)
    margins, labels = [], []
    for _ in range(ctx.battery(150, 40)):
        length = float(rng.uniform(0.1, 10.0))
        left, right = _random_operator(rng), _random_operator(rng)
        a, b = ctx.exact(length, left, right), ctx.exact(length, right, left)
        margins.append(1e-10 * (1.0 + abs(a)) - abs(a - b))
        labels.append(f"({left}, {right}, L={length:.4g}): {a:.12g} vs {b:.12g}")
    return _summary(margins, labels)


def check_length_scaling(ctx):
    rng = ctx.rng(6)
    margins, labels = [], []
    for _ in range(ctx.battery(100, 30)):
        length = float(rng.uniform(0.1, 10.0))
        left, right = _random_operator(rng), _random_operator(rng)
        unit = Problem1D(1.0, left, right)
        direct = principal_eigenvalue_1d(unit.rescaled(length), ctx.tol).value
        scaled = principal_eigenvalue_1d(unit, ctx.tol).value / length ** 2
        margins.append(1e-10 * max(1.0, abs(direct)) - abs(direct - scaled))
        labels.append(f"{unit.rescaled(length)}: {direct:.12g} vs {scaled:.12g}")
    return _summary(margins, labels)


def check_ball_scaling(ctx):
    margins, labels = [], []
    # the direct side shoots on B_R itself, never through the unit-ball detour
    for radius in (0.01, 0.1, 0.5, 1.0, 10.0):
        direct = radius ** 2 * ctx.ball(2, radius, R(1.0), rescale=False)
        scaled = sigma_scaled(2, radius, 1.0, ctx.discrete_tol, ctx.steps)
        margins.append(1e-8 - abs(direct - scaled) / abs(scaled))
        labels.append(f"R={radius:g}: R^2 sigma {direct:.12g} vs Sigma {scaled:.12g}")
    for beta in (-1.0, 1.0, 2.0):
        for radius in (0.5, 1.0):
            ball = ctx.ball(1, radius, R(beta))
            interval = ctx.exact(radius, N, R(beta))
            margins.append(1e-9 * max(1.0, abs(interval)) - abs(ball - interval))
            labels.append(f"N=1, R={radius:g}, beta={beta:g}: {ball:.12g} vs {interval:.12g}")
    return _summary(margins, labels)


def check_eigenfunction_residuals(ctx):
    rng = ctx.rng(7)
    margins, labels = [], []
    for _ in range(ctx.battery(100, 30)):
        length = float(rng.uniform(0.1, 10.0))
        left, right = _random_operator(rng), _random_operator(rng)
        estimate = principal_eigenvalue_1d(Problem1D(length, left, right), ctx.tol)
        profile, sigma = estimate.eigenfunction, estimate.value
        x = rng.uniform(0.0, length, 100)
        scale = max(1.0, abs(sigma))
        interior = float(np.max(np.abs(profile.derivative(x, 2) + sigma * profile(x)))) / scale
        defects = []
        for op, point, sign in ((left, 0.0, -1.0), (right, length, 1.0)):
            value = float(profile(point))
            if op.is_dirichlet:
                defects.append(abs(value))
            else:
                defects.append(abs(sign * float(profile.derivative(point)) + op.beta * value)
                               / max(1.0, abs(op.beta), math.sqrt(abs(sigma))))
        worst = max(interior, *defects)
        margins.append(1e-8 - worst)
        labels.append(f"({left}, {right}, L={length:.4g}): defect {worst:.3g}")
    return _summary(margins, labels)


def check_eigenfunction_positivity(ctx):
    rng = ctx.rng(8)
    margins, labels = [], []
    for _ in range(ctx.battery(100, 30)):
        length = float(rng.uniform(0.1, 10.0))
        left, right = _random_operator(rng), _random_operator(rng)
        estimate = principal_eigenvalue_1d(Problem1D(length, left, right), ctx.tol)
        x = np.linspace(0.0, length, 52)[1:-1]
        margins.append(float(np.min(estimate.sample(x))))
        labels.append(f"exact ({left}, {right}, L={length:.4g})")

    profile = principal_eigenvalue_1d(Problem1D(1.0, N, R(1.0)), ctx.tol).eigenfunction
    x = np.linspace(0.0, 1.0, 200)
    margins.append(float(np.min(-np.diff(profile(x)))))
    labels.append("Neumann-Robin(1) profile strictly decreasing")

    tridiag = principal_eigenvalue_tridiag(Problem1D(2.0, R(-2.0), R(1.0)), 512, ctx.discrete_tol)
    margins.append(float(np.min(tridiag.sample(np.linspace(0.0, 2.0, 50)[1:-1]))))
    labels.append("tridiagonal (R(-2), R(1), L=2)")

    ball = principal_eigenvalue_ball(BallProblem(3, 1.0, R(-1.0)), ctx.discrete_tol, ctx.steps)
    margins.append(float(np.min(ball.sample(np.linspace(0.0, 1.0, 50)))))
    labels.append("ball N=3 Robin(-1)")

    mesh = mesh_disk(1.0, 16, R(-2.0))
    fem = ctx.fem(mesh)
    nodal = fem.eigenfunction.nodal[interior_vertices(mesh)]
    margins.append(float(np.min(nodal)))
    labels.append("FEM disk Robin(-2) interior vertices")
    return _summary(margins, labels, strict=True)


def check_dirichlet_dominance(ctx):
    rng = ctx.rng(9)
    margins, labels = [], []
    for _ in range(ctx.battery(100, 30)):
        length = float(rng.uniform(0.1, 10.0))
        left = _random_operator(rng, dirichlet=0.0)
        right = _random_operator(rng)
        if rng.random() < 0.5:
            left, right = right, left
        value = ctx.exact(length, left, right)
        ceiling = dirichlet_value(length)
        margins.append(ceiling - value)
        labels.append(f"({left}, {right}, L={length:.4g}): {value:.8g} < {ceiling:.8g}")
    robin = ctx.fem(mesh_rectangle(1.0, 1.0, 16, R(2.0))).value
    dirichlet = ctx.fem(mesh_rectangle(1.0, 1.0, 16, D)).value
    margins.append(dirichlet - robin)
    labels.append(f"unit square Robin(2) {robin:.6g} < Dirichlet {dirichlet:.6g}")
    return _summary(margins, labels, strict=True)


def check_fem_dirichlet_square(ctx):
    margins, labels = [], []
    resolutions = (16, 32, 64)
    values = [ctx.fem(mesh_rectangle(1.0, 1.0, n, D)).value for n in resolutions]
    exact = dirichlet_square_value(1.0)
    margins.append(5e-3 - abs(values[-1] / exact - 1.0))
    labels.append(f"resolution 64: {values[-1]:.8g} vs {exact:.8g}")
    order = convergence_order([(1.0 / n, v) for n, v in zip(resolutions, values)])
    margins.append(0.2 - abs(order - 2.0))
    labels.append(f"convergence order {order:.4f}")

    neumann = ctx.fem(mesh_rectangle(1.0, 1.0, 16, N))
    margins.append(1e-10 - abs(neumann.value))
    labels.append(f"Neumann square {neumann.value:.3g}")
    spread = float(np.ptp(neumann.eigenfunction.nodal))
    margins.append(1e-6 - spread)
    labels.append(f"Neumann eigenvector spread {spread:.3g}")

    system = assemble_fem(mesh_rectangle(1.0, 1.0, 16, R(-1.0)), robin_sign=ctx.robin_sign)
    estimate = smallest_eig_sparse(system.A, system.M, system.lower_bound, ctx.discrete_tol)
    margins.append(estimate.value - system.lower_bound)
    labels.append(f"spectral lower bound {system.lower_bound:.6g} <= {estimate.value:.6g}")
    return _summary(margins, labels)


def check_csv_determinism(ctx):
    spec = SweepSpec(SweepFamily.INTERVAL, 1.0, 0.5, 6, left=R(1.0), right=R(2.0), tol=ctx.tol)
    with tempfile.TemporaryDirectory() as directory:
        first, second = os.path.join(directory, 'a.csv'), os.path.join(directory, 'b.csv')
        result = run_sweep(spec, max_workers=3)
        write_sweep_csv(result, first, timings=False)
        write_sweep_csv(run_sweep(spec, max_workers=1), second, timings=False)
        identical = filecmp.cmp(first, second, shallow=False)
        rows = read_sweep_csv(first)
    same = all(a.scale == b.scale and a.sigma == b.sigma and a.residual == b.residual and a.method == b.method
               for a, b in zip(rows, result.rows)) and len(rows) == len(result.rows)
    passed = identical and same
    return Outcome(passed, 0.0 if passed else -1.0,
                   f"byte-identical: {identical}, round trip exact: {same}")


def check_isoperimetric(ctx):
    margins, labels = [], []
    for n in range(1, 6):
        margin = isoperimetric_check(ball_geometry(n, 1.0))
        margins.append(1e-12 - abs(margin))
        labels.append(f"unit ball N={n}: margin {margin:.3g}")
    square = isoperimetric_check(rectangle_geometry(1.0, 1.0))
    margins.append(1e-12 - abs(square - (4.0 - 2.0 * math.sqrt(math.pi))))
    labels.append(f"unit square margin {square:.6g}")
    for mesh in (mesh_disk(1.0, 64), mesh_rectangle(2.0, 1.0, 16), mesh_annulus(0.5, 1.0, 32)):
        margin = isoperimetric_check(mesh_geometry(mesh))
        margins.append(margin + 5e-3)
        labels.append(f"{mesh!r}: margin {margin:.4g}")
    disk = isoperimetric_check(mesh_geometry(mesh_disk(1.0, 64)))
    margins.append(5e-3 - abs(disk))
    labels.append(f"mesh disk margin {disk:.3g}")
    return _summary(margins, labels)


def check_ratio_blowup(ctx):
    margins, labels = [], []
    factors = np.array([2.0 ** -k for k in range(8)])
    for geometry in (ball_geometry(2, 1.0), ball_geometry(3, 1.0), rectangle_geometry(1.0, 2.0),
                     annulus_geometry(0.5, 1.0)):
        ratios = np.array([geometry.shrunk(t).ratio for t in factors])
        exponent, _ = np.polyfit(np.log(factors), np.log(ratios), 1)
        margins.append(1e-6 - abs(exponent + 1.0))
        labels.append(f"{geometry.label}: exponent {exponent:.8f}")
    return _summary(margins, labels)


def check_omega_monte_carlo(ctx):
    margins, labels = [], []
    known = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}
    for n, value in known.items():
        margins.append(1e-14 - abs(omega_n(n) - value))
        labels.append(f"omega_{n} = {omega_n(n):.15g}")
    samples = ctx.battery(200_000, 50_000)
    for n in range(1, 6):
        estimate, error = monte_carlo_ball_volume(n, samples, SEED + n)
        margins.append(3.0 * error - abs(estimate - omega_n(n)))
        labels.append(f"N={n}: Monte Carlo {estimate:.5g} +- {error:.2g} vs {omega_n(n):.6g}")
    return _summary(margins, labels)


def check_mesh_geometry(ctx):
    margins, labels = [], []
    square = mesh_rectangle(1.0, 1.0, 64)
    margins.append(0.0 if square.n_vertices == 65 ** 2 else -1.0)
    labels.append(f"unit square has {square.n_vertices} vertices")
    margins.append(1e-12 - abs(mesh_geometry(square).measure - 1.0))
    labels.append("unit square area")
    rect = mesh_geometry(mesh_rectangle(2.0, 3.0, 16))
    margins.append(1e-12 - max(abs(rect.measure - 6.0), abs(rect.boundary_area - 10.0)))
    labels.append(f"2 x 3 rectangle ({rect.measure:.15g}, {rect.boundary_area:.15g})")
    disk = mesh_geometry(mesh_disk(1.0, 64))
    margins.append(1e-3 - abs(disk.measure / math.pi - 1.0))
    labels.append(f"disk(1, 64) area {disk.measure:.8g}")
    fine = mesh_geometry(mesh_disk(1.0, 128))
    margins.append(5e-4 - abs(fine.boundary_area / (2.0 * math.pi) - 1.0))
    labels.append(f"disk(1, 128) perimeter {fine.boundary_area:.8g}")
    annulus_mesh = mesh_annulus(0.5, 1.0, 64)
    annulus = mesh_geometry(annulus_mesh)
    margins.append(5e-3 - abs(annulus.measure / (0.75 * math.pi) - 1.0))
    labels.append(f"annulus(0.5, 1, 64) area {annulus.measure:.8g}")
    loops = len(boundary_loops(annulus_mesh))
    margins.append(0.0 if loops == 2 else -1.0)
    labels.append(f"annulus boundary loops: {loops}")
    return _summary(margins, labels)


CHECKS = (
    ('closed_forms', check_closed_forms, False),
    ('antisymmetric_pair_constant', check_antisymmetric_pair_constant, False),
    ('small_length_rates', check_small_length_rates, False),
    ('zero_eigenvalue_manifolds', check_zero_eigenvalue_manifolds, False),
    ('tridiagonal_oracle', check_tridiagonal_oracle, False),
    ('fem_dirichlet_square', check_fem_dirichlet_square, False),
    ('disk_fem_vs_shooting', check_disk_fem_vs_shooting, False),
    ('ball_exceeds_interval', check_ball_exceeds_interval, True),
    ('faber_krahn', check_faber_krahn, True),
    ('negative_robin_upper_bound', check_negative_robin_upper_bound, True),
    ('shrinking_square_blowup', check_shrinking_square_blowup, True),
    ('scaled_eigenvalue_slope', check_scaled_eigenvalue_slope, False),
    ('expansion_coefficients', check_expansion_coefficients, False),
    ('scaled_eigenvalue_derivative', check_scaled_eigenvalue_derivative, False),
    ('monotonicity_endpoints', check_monotonicity_endpoints, True),
    ('monotonicity_ball', check_monotonicity_ball, True),
    ('monotonicity_fem', check_monotonicity_fem, True),
    ('endpoint_symmetry', check_endpoint_symmetry, False),
    ('length_scaling', check_length_scaling, False),
    ('ball_scaling', check_ball_scaling, False),
    ('eigenfunction_residuals', check_eigenfunction_residuals, False),
    ('eigenfunction_positivity', check_eigenfunction_positivity, True),
    ('dirichlet_dominance', check_dirichlet_dominance, True),
    ('csv_determinism', check_csv_determinism, False),
    ('isoperimetric', check_isoperimetric, False),
    ('ratio_blowup', check_ratio_blowup, False),
    ('omega_monte_carlo', check_omega_monte_carlo, False),
    ('mesh_geometry', check_mesh_geometry, False),
)

CHECK_NAMES = tuple(name for name, _, _ in CHECKS)


def _run_check(name, check, strict, ctx):
    started = time.perf_counter()
    try:
        outcome = check(ctx)
    except Exception as e:
        logger.error(f"Check {name} raised {type(e).__name__}: {e}")
        return CheckResult(name, False, math.nan, f"{type(e).__name__}: {e}",
                           time.perf_counter() - started, strict)
    seconds = time.perf_counter() - started
    level = logging.INFO if outcome.passed else logging.WARNING
    logger.log(level, f"Check {name}: {'passed' if outcome.passed else 'FAILED'} "
                      f"(margin {outcome.margin:.4g}, {seconds:.2f}s)")
    return CheckResult(name, outcome.passed, outcome.margin, outcome.detail, seconds, strict)


def verify_all(tol=None, fast=False, robin_sign=1.0, max_workers=None, only=None):
    """
    Run the verification suite

    A failing or raising check is recorded in the report; the suite never
    stops early.

    Args:
        tol: TolerancePolicy for the exact solvers; its eig_rel_tol also widens
            the discretization policy when looser than the default
        fast: Smaller batteries and resolutions, every check still runs
        robin_sign: Multiplier on the Robin term of the FEM assembly
        max_workers: Worker cap for running checks concurrently
        only: Optional iterable of check names to run

    Returns:
        VerificationReport
    """
    tol = tol or TolerancePolicy.from_config()
    discrete = TolerancePolicy.for_discretization()
    discrete = discrete.with_overrides(root_abs_tol=tol.root_abs_tol,
                                       eig_rel_tol=max(discrete.eig_rel_tol, tol.eig_rel_tol),
                                       max_iterations=tol.max_iterations)
    ctx = VerifyContext(tol, discrete, fast, robin_sign,
                        steps=1024 if fast else Config.SHOOTING_STEPS,
                        fem_resolution=32 if fast else Config.FEM_RESOLUTION)
    selected = [c for c in CHECKS if only is None or c[0] in set(only)]
    workers = max_workers or Config().worker_count
    logger.info(f"Running {len(selected)} checks{' in fast mode' if fast else ''} with {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda c: _run_check(c[0], c[1], c[2], ctx), selected))
    report = VerificationReport(results, tol, discrete, fast, robin_sign)
    if report.passed:
        logger.info("All checks passed")
    else:
        logger.warning(f"{len(report.failures)} checks failed: {', '.join(r.name for r in report.failures)}")
    return report
