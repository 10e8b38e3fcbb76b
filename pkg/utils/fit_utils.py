"""
Trend classification of (scale, sigma) samples and convergence-order fits
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from utils.core_types import FitFailure, InsufficientData

logger = logging.getLogger(__name__)

CONSTANT_REL_TOL = 1e-8
MIN_QUALITY = 0.999
NUISANCE_MIN_ROWS = 6
PREFERENCE_MARGIN = 1e-9
PLATEAU_REL_TOL = 1e-14


class ModelKind(Enum):
    CONSTANT = 'Constant'
    LINEAR = 'Linear'
    POWER_LAW = 'PowerLaw'
    DIVERGING = 'Diverging'


@dataclass(frozen=True)
class FittedModel:
    """
    Fitted trend of sigma against the scale. `divergence` is the sign of an
    unbounded trend as the scale shrinks, 0 for a bounded one.
    """
    kind: ModelKind
    params: dict = field(default_factory=dict)
    quality: float = 1.0
    divergence: int = 0

    def __str__(self):
        inner = ', '.join(f"{k}={v:.6g}" for k, v in self.params.items())
        return f"{self.kind.value}({inner})"

    def predict(self, scale):
        """Model value at the given scale(s); nan for Diverging"""
        s = np.asarray(scale, dtype=float)
        p = self.params
        if self.kind is ModelKind.CONSTANT:
            return np.full_like(s, p['c'])
        if self.kind is ModelKind.LINEAR:
            return p['intercept'] + p['slope'] * s + p.get('curvature', 0.0) * s ** 2
        if self.kind is ModelKind.POWER_LAW:
            return p['C'] * s ** p['p']
        return np.full_like(s, np.nan)


def _as_pairs(rows):
    """Converged (scale, sigma) pairs from SweepRow objects or plain tuples"""
    pairs = []
    for row in rows:
        if hasattr(row, 'scale'):
            if not row.converged:
                continue
            pairs.append((row.scale, row.sigma))
        else:
            pairs.append((float(row[0]), float(row[1])))
    pairs.sort(key=lambda pair: -pair[0])
    return np.array([p[0] for p in pairs], dtype=float), np.array([p[1] for p in pairs], dtype=float)


def _r_squared(y, fitted):
    total = np.sum((y - np.mean(y)) ** 2)
    if total == 0:
        return 1.0
    return float(1.0 - np.sum((y - fitted) ** 2) / total)


def _linear_fit(scale, sigma):
    columns = [np.ones_like(scale), scale]
    if scale.size >= NUISANCE_MIN_ROWS:
        columns.append(scale ** 2)
    design = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(design, sigma, rcond=None)
    params = {'slope': float(coef[1]), 'intercept': float(coef[0])}
    if coef.size == 3:
        params['curvature'] = float(coef[2])
    return params, _r_squared(sigma, design @ coef)


def _power_fit(scale, sigma):
    signs = np.sign(sigma)
    if np.any(signs == 0) or np.any(signs != signs[0]):
        return None, -math.inf
    x, y = np.log(scale), np.log(np.abs(sigma))
    p, log_c = np.polyfit(x, y, 1)
    params = {'C': float(signs[0] * math.exp(log_c)), 'p': float(p)}
    return params, _r_squared(y, p * x + log_c)


def fit_rate(rows):
    """
    Classify the trend of sigma as the scale shrinks

    Tries Constant, then Linear (with an O(scale^2) nuisance term once six or
    more rows are available), then PowerLaw in log-log coordinates, each
    accepted at R^2 >= 0.999. A power law that fits strictly better than the
    linear model takes precedence over it. Anything else is Diverging with the
    sign of the trend towards small scales.

    Args:
        rows: SweepRow objects (only converged rows are used) or (scale, sigma) tuples

    Returns:
        FittedModel

    Raises:
        FitFailure: If fewer than three usable rows remain
    """
    scale, sigma = _as_pairs(rows)
    if scale.size < 3:
        raise FitFailure(f"Need at least 3 converged rows, got {scale.size}")
    if not (np.all(np.isfinite(sigma)) and np.all(scale > 0)):
        raise FitFailure("Rows must carry positive scales and finite eigenvalues")

    mean = float(np.mean(sigma))
    if np.ptp(sigma) <= CONSTANT_REL_TOL * (1.0 + abs(mean)):
        return FittedModel(ModelKind.CONSTANT, {'c': mean}, 1.0, 0)

    linear, linear_quality = _linear_fit(scale, sigma)
    power, power_quality = _power_fit(scale, sigma)
    # on a narrow grid the quadratic nuisance term can mimic C/scale; an exact power law wins
    power_wins = power is not None and power_quality > linear_quality + PREFERENCE_MARGIN
    if linear_quality >= MIN_QUALITY and not power_wins:
        return FittedModel(ModelKind.LINEAR, linear, linear_quality, 0)

    if power is not None and power_quality >= MIN_QUALITY:
        divergence = int(np.sign(power['C'])) if power['p'] < 0 else 0
        return FittedModel(ModelKind.POWER_LAW, power, power_quality, divergence)

    # rows are ordered by decreasing scale
    tail = sigma[-3:]
    sign = int(np.sign(tail[-1] - tail[0])) or int(np.sign(sigma[-1] - sigma[0]))
    logger.info(f"No model reaches R^2 >= {MIN_QUALITY}; classifying as Diverging({sign:+d})")
    return FittedModel(ModelKind.DIVERGING, {'sign': float(sign)}, max(linear_quality, power_quality), sign)


def _order_from_three(h, sigma):
    """Observed order from the three finest samples"""
    d_coarse = sigma[-3] - sigma[-2]
    d_fine = sigma[-2] - sigma[-1]
    scale = max(1.0, float(np.max(np.abs(sigma[-3:]))))
    if abs(d_fine) <= PLATEAU_REL_TOL * scale or abs(d_coarse) <= PLATEAU_REL_TOL * scale:
        raise InsufficientData("Samples have reached a plateau; no observable convergence")
    ratio = d_coarse / d_fine
    if ratio <= 1.0:
        raise InsufficientData(f"Differences do not shrink (ratio {ratio:.3g})")
    r1, r2 = h[-3] / h[-2], h[-2] / h[-1]
    if abs(r1 - r2) <= 1e-12 * r2:
        return math.log(ratio) / math.log(r2)

    def mismatch(p):
        return (h[-3] ** p - h[-2] ** p) / (h[-2] ** p - h[-1] ** p) - ratio

    try:
        return brentq(mismatch, 1e-3, 20.0)
    except ValueError as e:
        raise InsufficientData(f"Could not resolve an order from the three finest samples: {e}") from e


def convergence_order(pairs):
    """
    Order p in |sigma(h) - sigma*| ~ C h^p

    sigma* is the Richardson extrapolant of the two finest samples, using the
    order observed on the three finest; p is then the log-log least-squares
    slope over all samples.

    Args:
        pairs: (h, sigma) with h strictly decreasing

    Returns:
        float

    Raises:
        InsufficientData: On fewer than three pairs or a plateau
    """
    if len(pairs) < 3:
        raise InsufficientData(f"Need at least 3 (h, sigma) pairs, got {len(pairs)}")
    h = np.array([float(p[0]) for p in pairs])
    sigma = np.array([float(p[1]) for p in pairs])
    if np.any(h <= 0) or np.any(np.diff(h) >= 0):
        raise InsufficientData("Mesh sizes must be positive and strictly decreasing")

    p0 = _order_from_three(h, sigma)
    limit = sigma[-1] + (sigma[-1] - sigma[-2]) / ((h[-2] / h[-1]) ** p0 - 1.0)
    errors = np.abs(sigma - limit)
    usable = errors > 0
    if np.count_nonzero(usable) < 2:
        raise InsufficientData("Too few samples differ from the extrapolated limit")
    order, _ = np.polyfit(np.log(h[usable]), np.log(errors[usable]), 1)
    logger.debug(f"Observed order {p0:.4f}, fitted order {order:.4f}, limit {limit:.12g}")
    return float(order)
