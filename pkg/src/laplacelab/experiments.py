"""Sweep orchestration and summaries over (d, n, c, seed) cells.

Each cell is a pure function of the grid and its coordinates: the sample
depends on (seed, d, n) only, so every bandwidth of a (d, n, seed) triple
sees the same data and the same test points.
"""

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import hashlib
import json
import logging
from math import isclose, nan, sqrt
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError
from scipy.stats import spearmanr

from laplacelab import __version__
from laplacelab.bump import (build_witness, witness_convention_norm,
    witness_l2_norm_sq)
from laplacelab.errors import LaplaceLabError, SummaryError, UsageError
from laplacelab.geometry import (Domain, SampleSet, bulk_subset, draw_sample,
    find_target, separation_stats)
from laplacelab.interpolant import convention_norm, fit_ridge
from laplacelab.kernel import KernelConfig
from laplacelab.records import (SweepRecord, PathLike, check_sink,
    emit_records)
from laplacelab.risk import (holder_certificate, local_residual_mass,
    mc_l2_norm_sq, mc_l2_risk, target_norm_proxy)
from laplacelab.setting import (CERTIFICATE_BULK, GRID_KEYS,
    INCONSISTENCY_FLOOR, LOCAL_MASS_BETA, LOCAL_MASS_PER_BALL,
    SPIKE_MULTIPLIER, SPIKE_RATIO_CEILING, TREND_FLOOR, _DEFAULT_GRID)

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid of experiment cells.

    c_rule decides how c_values turn into bandwidths: 'scaled' uses
    c = value * n^{1/d}, 'absolute' uses c = value and 'sqrt_d' uses
    c = value * √d.
    """
    d_list: Tuple[int, ...] = _DEFAULT_GRID['d_list']
    n_list: Tuple[int, ...] = _DEFAULT_GRID['n_list']
    c_rule: str = _DEFAULT_GRID['c_rule']
    c_values: Tuple[float, ...] = _DEFAULT_GRID['c_values']
    seeds: Tuple[int, ...] = _DEFAULT_GRID['seeds']
    f0: str = _DEFAULT_GRID['f0']
    m_test: int = _DEFAULT_GRID['m_test']
    alpha_witness: float = _DEFAULT_GRID['alpha_witness']
    ridge: float = _DEFAULT_GRID['ridge']

    def __post_init__(self):
        for name in ('d_list', 'n_list', 'c_values', 'seeds'):
            if not getattr(self, name):
                raise UsageError(f'{name} must not be empty')
        if any(d < 1 or d % 2 == 0 for d in self.d_list):
            raise UsageError(f'd_list must hold odd dimensions: {self.d_list}')
        if any(n < 1 for n in self.n_list):
            raise UsageError(f'n_list must be positive: {self.n_list}')
        if any(c <= 0 for c in self.c_values):
            raise UsageError(f'c_values must be positive: {self.c_values}')
        if self.c_rule not in GRID_KEYS['c_rule']:
            raise UsageError(f'unknown c_rule {self.c_rule!r}')
        if self.f0 not in GRID_KEYS['f0']:
            raise UsageError(f'unknown f0 {self.f0!r}')
        if self.m_test < 2:
            raise UsageError('m_test must be at least 2')
        if not 0 < self.alpha_witness < 0.5:
            raise UsageError('alpha_witness must be in (0, 1/2)')
        if self.ridge < 0:
            raise UsageError('ridge must be >= 0')

    def bandwidth(self, d: int, n: int, value: float) -> float:
        if self.c_rule == 'scaled':
            return value * n ** (1.0 / d)
        if self.c_rule == 'sqrt_d':
            return value * sqrt(d)
        return value

    def cells(self) -> List[Tuple[int, int, float, int]]:
        """All (d, n, c value, seed) coordinates in canonical order."""
        return sorted((d, n, value, seed) for d in self.d_list
            for n in self.n_list for value in self.c_values
            for seed in self.seeds)

    @property
    def digest(self) -> str:
        """sha256 of the canonical JSON form of the grid."""
        text = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

def _parse_value(key: str, text: str):
    kind = GRID_KEYS[key]
    items = [item.strip() for item in text.split(',') if item.strip()]
    try:
        if kind in ('ints', 'odd_ints'):
            return tuple(int(item) for item in items)
        if kind == 'floats':
            return tuple(float(item) for item in items)
        if kind == 'int':
            return int(text)
        if kind == 'float':
            return float(text)
    except ValueError as error:
        raise UsageError(f'bad value for {key}: {text!r}') from error
    if text.strip() not in kind:
        raise UsageError(f'{key} must be one of {kind}, got {text.strip()!r}')
    return text.strip()

def parse_grid(text: str, **overrides) -> SweepGrid:
    """Parse flat `key = value` lines; '#' starts a comment."""
    values: Dict[str, object] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise UsageError(f'line {number}: expected key = value')
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in GRID_KEYS:
            raise UsageError(f'line {number}: unknown key {key!r}')
        values[key] = _parse_value(key, value)
    values.update(overrides)
    return SweepGrid(**values)

def load_grid(path: PathLike, **overrides) -> SweepGrid:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as error:
        raise UsageError(f'cannot read grid file {path}: {error}') from error
    return parse_grid(text, **overrides)

def stream_seed(seed: int, *key: int) -> int:
    """Independent 32-bit seed for a named stream of a cell."""
    sequence = np.random.SeedSequence(seed, spawn_key=key)
    return int(sequence.generate_state(1)[0])

def search_witness_alpha(sample: SampleSet, radii,
        f0: Union[str, None] = None, start: float = 0.4, shrink: float = 0.5,
        max_steps: int = 60) -> float:
    """Shrink α until ‖g_α‖² <= ‖f_0‖²_{L²(Ω)} / 3."""
    budget = find_target(f0 or sample.f0_id).l2_norm_sq_on_omega(sample.d) / 3
    alpha = start
    for _ in range(max_steps):
        if witness_l2_norm_sq(build_witness(sample, radii, alpha)) <= budget:
            return alpha
        alpha *= shrink
    raise LaplaceLabError(f'no alpha >= {alpha:.3e} meets the L2 budget')

def _failed_record(grid: SweepGrid, d: int, n: int, c: float, value: float,
        seed: int, message: str) -> SweepRecord:
    return SweepRecord(d, n, c, value, seed, grid.f0, grid.ridge, nan, nan,
        grid.m_test, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
        nan, nan, nan, grid.digest, __version__, message)

def run_cell(grid: SweepGrid, d: int, n: int, value: float,
        seed: int) -> SweepRecord:
    """Fit and measure one cell; failures become error records."""
    c = grid.bandwidth(d, n, value)
    try:
        sample = draw_sample(n, d, grid.f0, seed, stream=(d, n))
        domain = Domain(d)
        cfg = KernelConfig(d, c, 'paper')
        model = fit_ridge(cfg, sample, grid.ridge)
        stats = separation_stats(sample.points, include_boundary=True)
        risk = mc_l2_risk(model, grid.f0, domain, grid.m_test,
            stream_seed(seed, d, n, 1))
        l2_fhat = mc_l2_norm_sq(model, domain, grid.m_test,
            stream_seed(seed, d, n, 2))
        witness = build_witness(sample, stats.radii, grid.alpha_witness)
        if grid.ridge == 0:
            bulk = bulk_subset(stats.radii, CERTIFICATE_BULK)
            proxy = target_norm_proxy(sample, stats.radii, cfg,
                grid.alpha_witness)
            certificate = holder_certificate(model, sample, stats,
                bulk.indices, cfg, proxy).value
        else:
            certificate = nan
        local_mass = local_residual_mass(model, grid.f0, sample, stats.radii,
            LOCAL_MASS_BETA, LOCAL_MASS_PER_BALL, stream_seed(seed, d, n, 3))
    except (LaplaceLabError, LinAlgError, ArithmeticError) as error:
        logger.error('cell d=%d n=%d c=%g seed=%d failed: %s', d, n, c, seed,
            error)
        return _failed_record(grid, d, n, c, value, seed, str(error))
    averages = stats.power_averages
    record = SweepRecord(d, n, c, value, seed, grid.f0, grid.ridge,
        risk.mean, risk.std_error, risk.m, l2_fhat.mean, l2_fhat.std_error,
        find_target(grid.f0).l2_norm_sq_on_omega(d), convention_norm(model),
        witness_convention_norm(witness, cfg), grid.alpha_witness,
        certificate, local_mass, stats.sum_rd, averages[-1], averages[1],
        averages[d], model.diagnostics.jitter_used,
        model.diagnostics.residual_max, grid.digest, __version__)
    logger.info('cell d=%d n=%d c=%g seed=%d risk=%.4f', d, n, c, seed,
        risk.mean)
    return record

def _run_cell_packed(args) -> SweepRecord:
    return run_cell(*args)

def collect_records(grid: SweepGrid, jobs: int = 1) -> List[SweepRecord]:
    """Run every cell, in parallel when jobs > 1, in canonical order."""
    tasks = [(grid,) + cell for cell in grid.cells()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            records = list(executor.map(_run_cell_packed, tasks))
    else:
        records = [_run_cell_packed(task) for task in tasks]
    return sorted(records, key=lambda record: record.coordinates)

def sweep_records(grid: SweepGrid, out: PathLike,
        jobs: int = 1) -> List[SweepRecord]:
    """Run the grid, write the records to out (.csv or .json) and return
    them.

    Raises:
        SinkError: out cannot be written; raised before any compute.
    """
    if jobs < 1:
        raise UsageError(f'jobs must be at least 1, got {jobs}')
    check_sink(out)
    records = collect_records(grid, jobs)
    emit_records(records, out)
    failed = sum(record.failed for record in records)
    if failed:
        logger.warning('%d of %d cells failed', failed, len(records))
    return records

def run_sweep(grid: SweepGrid, out: PathLike, jobs: int = 1) -> int:
    """Run the grid, write the records and return how many were written."""
    return len(sweep_records(grid, out, jobs))

@dataclass(frozen=True)
class MinRiskRow:
    """Minimum over c of the seed-mean risk for one (d, n)."""
    d: int
    n: int
    min_risk: float
    band_low: float
    band_high: float
    best_c_multiplier: float
    seeds: int

    @property
    def passed(self) -> bool:
        """The minimum stays at or above INCONSISTENCY_FLOOR."""
        return self.min_risk >= INCONSISTENCY_FLOOR

@dataclass(frozen=True)
class InconsistencySummary:
    rows: List[MinRiskRow]
    trends: Dict[int, float]
    excluded: List[Tuple[int, int, float, int]] = field(default_factory=list)

    def row(self, d: int, n: int) -> MinRiskRow:
        for row in self.rows:
            if (row.d, row.n) == (d, n):
                return row
        raise KeyError((d, n))

    def trend_passed(self, d: int) -> bool:
        """No decreasing trend of the minimum in n."""
        return self.trends[d] > TREND_FLOOR

    @property
    def passed(self) -> bool:
        return (all(row.passed for row in self.rows)
            and all(self.trend_passed(d) for d in self.trends))

@dataclass(frozen=True)
class SpikeRow:
    """‖f̂‖²_{L²(Ω)} / ‖f_0‖²_{L²(Ω)} averaged over seeds.

    scaled is set when every record of the row used c = multiplier·n^{1/d}.
    """
    d: int
    n: int
    c_multiplier: float
    ratio: float
    ratio_spread: float
    scaled: bool = True

    @property
    def gated(self) -> bool:
        """Row sits in the spike regime c = SPIKE_MULTIPLIER·n^{1/d}."""
        return self.scaled and isclose(self.c_multiplier, SPIKE_MULTIPLIER)

    @property
    def passed(self) -> bool:
        return not self.gated or self.ratio <= SPIKE_RATIO_CEILING

def split_usable(records: Sequence[SweepRecord]):
    """Drop failed cells and cells that needed jitter."""
    usable, excluded = [], []
    for record in records:
        if record.failed or record.jitter_used > 0:
            excluded.append(record.coordinates)
        else:
            usable.append(record)
    if excluded:
        logger.info('excluding %d cells (failed or jittered)', len(excluded))
    return usable, excluded

def _group_by_cell(records: Sequence[SweepRecord]):
    groups = defaultdict(lambda: defaultdict(list))
    for record in records:
        groups[(record.d, record.n)][record.c_multiplier].append(record)
    for key, by_c in groups.items():
        if len(by_c) < 2:
            raise SummaryError(
                f'(d, n) = {key} needs at least 2 bandwidths, has {len(by_c)}')
    return groups

def _trend(ns: List[int], values: List[float]) -> float:
    if len(ns) < 2 or np.ptp(values) == 0:
        return 0.0
    correlation = spearmanr(ns, values)[0]
    return float(correlation) if np.isfinite(correlation) else 0.0

def inconsistency_summary(records: Sequence[SweepRecord]
        ) -> InconsistencySummary:
    """Per (d, n) minimum over c of the mean risk, with seed bands.

    The trend per d is the Spearman correlation of the minimum with n.
    """
    usable, excluded = split_usable(records)
    if not usable:
        raise SummaryError('no usable records')
    rows: List[MinRiskRow] = []
    for (d, n), by_c in sorted(_group_by_cell(usable).items()):
        means = {value: float(np.mean([r.risk_mean for r in cell]))
            for value, cell in by_c.items()}
        best = min(means, key=lambda value: (means[value], value))
        risks = [r.risk_mean for r in by_c[best]]
        rows.append(MinRiskRow(d, n, means[best], float(min(risks)),
            float(max(risks)), best, len(risks)))
    trends = {}
    for d in sorted({row.d for row in rows}):
        selected = [row for row in rows if row.d == d]
        trends[d] = _trend([row.n for row in selected],
            [row.min_risk for row in selected])
    return InconsistencySummary(rows, trends, excluded)

def spike_regime_summary(records: Sequence[SweepRecord]) -> List[SpikeRow]:
    """Table of the L² collapse ratio against c / n^{1/d}."""
    usable, _ = split_usable(records)
    if not usable:
        raise SummaryError('no usable records')
    rows: List[SpikeRow] = []
    for (d, n), by_c in sorted(_group_by_cell(usable).items()):
        for value in sorted(by_c):
            ratios = [r.l2_fhat_mean / r.l2_f0 for r in by_c[value]]
            scaled = all(isclose(r.c, value * n ** (1.0 / d), rel_tol=1e-9)
                for r in by_c[value])
            rows.append(SpikeRow(d, n, value, float(np.mean(ratios)),
                float(np.ptp(ratios)), scaled))
    return rows

def _flag(passed: bool) -> str:
    return 'ok' if passed else 'FAIL'

def format_summary(summary: InconsistencySummary,
        spikes: Optional[List[SpikeRow]] = None) -> str:
    """Plain-text report of the summaries.

    Rows checked against a threshold end in 'ok' or 'FAIL': every minimum
    risk against INCONSISTENCY_FLOOR, every trend against TREND_FLOOR and
    the spike-regime rows against SPIKE_RATIO_CEILING.
    """
    lines = ['   d      n   min risk   band low  band high   c value  floor']
    for row in summary.rows:
        lines.append(f'{row.d:4d} {row.n:6d} {row.min_risk:10.4f} '
            f'{row.band_low:10.4f} {row.band_high:10.4f} '
            f'{row.best_c_multiplier:9.4g}  {_flag(row.passed)}')
    for d, trend in summary.trends.items():
        lines.append(f'trend d={d}: spearman {trend:+.3f}  '
            f'{_flag(summary.trend_passed(d))}')
    if spikes:
        lines.append('   d      n   c value   |f|^2/|f0|^2  ceiling')
        for spike in spikes:
            flag = _flag(spike.passed) if spike.gated else '-'
            lines.append(f'{spike.d:4d} {spike.n:6d} '
                f'{spike.c_multiplier:9.4g} {spike.ratio:14.4f}  {flag}')
    lines.append(f'excluded cells: {len(summary.excluded)}')
    return '\n'.join(lines)
