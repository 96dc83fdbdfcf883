"""Risk-versus-bandwidth figures written as deterministic SVG."""

from collections import defaultdict
import logging
from math import ceil, isclose, sqrt
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from laplacelab.errors import SinkError, SummaryError
from laplacelab.experiments import split_usable
from laplacelab.records import PathLike, SweepRecord

logger = logging.getLogger(__name__)
logging.getLogger('matplotlib.font_manager').setLevel(logging.ERROR)

BLUE = '#4878A8'
CORAL = '#E57A5A'

SVG_PARAMS = {
    'svg.hashsalt': 'laplacelab',
    'svg.fonttype': 'none',
    'path.simplify': False
}

def _curves(records: Sequence[SweepRecord]
        ) -> Dict[Tuple[int, int], Dict[float, List[float]]]:
    curves = defaultdict(lambda: defaultdict(list))
    for record in records:
        curves[(record.d, record.n)][record.c_multiplier].append(
            record.risk_mean)
    for key, by_c in curves.items():
        if len(by_c) < 2:
            raise SummaryError(f'(d, n) = {key} needs at least 2 bandwidths '
                'to plot a curve')
    return curves

def _axis_label(records: Sequence[SweepRecord]) -> str:
    """Name of the grid value for the bandwidth rule the records follow."""
    rules = [('c', lambda r: 1.0),
        ('c / n^(1/d)', lambda r: r.n ** (1.0 / r.d)),
        ('c / sqrt(d)', lambda r: sqrt(r.d))]
    for label, scale in rules:
        if all(isclose(r.c, r.c_multiplier * scale(r), rel_tol=1e-9)
                for r in records):
            return label
    return 'c value'

def plot_risk_curves(records: Sequence[SweepRecord], path: PathLike) -> Path:
    """One panel per (d, n): seed-mean risk against c with a min/max band.

    The x axis is the c value of the grid on a log scale, labelled after
    the bandwidth rule: c, c / n^(1/d) or c / sqrt(d). Identical records
    give byte-identical files.
    """
    usable, _ = split_usable(records)
    if not usable:
        raise SummaryError('no usable records to plot')
    curves = _curves(sorted(usable, key=lambda record: record.coordinates))
    label = _axis_label(usable)
    keys = sorted(curves)
    columns = min(3, len(keys))
    rows = ceil(len(keys) / columns)
    path = Path(path)
    with plt.rc_context(SVG_PARAMS):
        fig, axes = plt.subplots(rows, columns, squeeze=False,
            figsize=(4 * columns, 3 * rows))
        for ax, key in zip(axes.flat, keys):
            by_c = curves[key]
            xs = np.array(sorted(by_c))
            values = [np.asarray(by_c[x]) for x in xs]
            ax.fill_between(xs, [v.min() for v in values],
                [v.max() for v in values], color=BLUE, alpha=0.25, lw=0)
            ax.plot(xs, [v.mean() for v in values], 'o-', color=BLUE, ms=3)
            ax.axhline(0.0, color=CORAL, lw=0.8, ls='--')
            ax.set_xscale('log')
            ax.set_title(f'd = {key[0]}, n = {key[1]}', fontsize=9)
            ax.set_xlabel(label, fontsize=8)
            ax.set_ylabel('risk', fontsize=8)
        for ax in list(axes.flat)[len(keys):]:
            ax.set_visible(False)
        fig.tight_layout()
        try:
            fig.savefig(path, format='svg', metadata={'Date': None})
        except OSError as error:
            raise SinkError(str(path), error.strerror) from error
        finally:
            plt.close(fig)
    logger.info('wrote %d panels to %s', len(keys), path)
    return path
