"""
Static SVG plots of sweep results
"""
import logging
import os

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from utils.fit_utils import ModelKind

logger = logging.getLogger(__name__)

SVG_HASH_SALT = 'robin-spectra'


def plot_sweep_svg(result, path):
    """
    Plot sigma against the scale with the fitted model overlaid

    Log axes are used for |sigma| when every converged value shares one
    non-zero sign; otherwise sigma is drawn on a linear axis.

    Args:
        result: SweepResult
        path: Output .svg path
    """
    rows = result.converged_rows
    scale = np.array([row.scale for row in rows])
    sigma = np.array([row.sigma for row in rows])
    signs = np.sign(sigma)
    log_y = sigma.size > 0 and np.all(signs != 0) and np.all(signs == signs[0])

    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(1, 1, 1)
    ax.set_xscale('log')
    if log_y:
        ax.set_yscale('log')
        values = np.abs(sigma)
        ax.set_ylabel('|sigma_1|' if signs[0] < 0 else 'sigma_1')
    else:
        values = sigma
        ax.set_ylabel('sigma_1')
    ax.plot(scale, values, 'o-', label='computed')

    model = result.model
    if model.kind is not ModelKind.DIVERGING and scale.size:
        fine = np.geomspace(scale.min(), scale.max(), 200)
        predicted = model.predict(fine)
        ax.plot(fine, np.abs(predicted) if log_y else predicted, '--', label=str(model))
    title = result.spec.describe()
    if result.exploratory:
        title += ' (no asserted limit)'
    ax.set_title(title, fontsize=9)
    ax.set_xlabel('scale')
    ax.grid(True, which='both', alpha=0.3)
    ax.legend(fontsize=8)

    directory = os.path.dirname(str(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT}):
        fig.savefig(path, format='svg', metadata={'Date': None})
    logger.info(f"Wrote sweep plot to {path}")
