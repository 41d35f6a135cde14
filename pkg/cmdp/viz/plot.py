import os
import logging
import warnings

import numpy as np


logger = logging.getLogger(__name__)

# Curves drawn from a summary table, (column, y-axis label)
REGRET = ('R', 'regret R(t)')
VIOLATION = ('C', 'constraint violation C(t)')
REWARD_RATE = ('reward_rate', 'average reward')


def _pyplot():
    try:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
        return plt
    except ImportError:
        warnings.warn('matplotlib is not installed, no plots are written. Install cmdplab[plot] to enable them.')
        return None


def save_mean_std_plot(path, t, curves, ylabel, title=None):
    """
    Writes one SVG figure with a mean line and a shaded band of one standard deviation per curve.

    :param path: target file, should end with .svg
    :param t: x values
    :param curves: list of (label, mean, std)
    :param ylabel: y-axis label
    :return: path or None if matplotlib is unavailable
    """
    plt = _pyplot()
    if plt is None:
        return None
    t = np.asarray(t, dtype=np.float64)
    fig = plt.figure(figsize=(6, 4))
    for label, mean, std in curves:
        mean, std = np.asarray(mean, dtype=np.float64), np.asarray(std, dtype=np.float64)
        line, = plt.plot(t, mean, label=label)
        plt.fill_between(t, mean - std, mean + std, color=line.get_color(), alpha=0.25, linewidth=0)
    plt.xlabel('t')
    plt.ylabel(ylabel)
    if title:
        plt.title(title)
    if len(curves) > 1:
        plt.legend()
    plt.tight_layout()
    plt.savefig(path, format='svg')
    plt.close(fig)
    return path


def save_summary_plots(directory, columns, rows, title=None):
    """
    Plots regret, constraint violation and average reward from the columns of a summary table
    (`t`, then `<column>_mean` and `<column>_std` per ledger column).

    :return: list of written paths
    """
    table = np.array(rows, dtype=np.float64).reshape(-1, len(columns))
    index = {name: i for i, name in enumerate(columns)}
    t = table[:, index['t']]
    paths = []
    for prefix, ylabel in (REGRET, VIOLATION, REWARD_RATE):
        names = [c[:-5] for c in columns if c.endswith('_mean') and (c[:-5] == prefix or c.startswith(prefix + '_'))]
        curves = [(name, table[:, index[name + '_mean']], table[:, index[name + '_std']]) for name in names]
        if not curves:
            continue
        path = save_mean_std_plot(os.path.join(directory, '%s.svg' % prefix.lower()), t, curves, ylabel, title)
        if path is None:
            break
        logger.debug('Wrote %s' % path)
        paths.append(path)
    return paths
