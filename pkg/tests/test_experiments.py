import unittest
from dataclasses import fields, replace
from math import isfinite, sqrt
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np

from laplacelab.bump import build_witness, witness_l2_norm_sq
from laplacelab.errors import SinkError, SummaryError, UsageError
from laplacelab.experiments import (SweepGrid, collect_records, format_summary,
    inconsistency_summary, load_grid, parse_grid, run_cell, run_sweep,
    search_witness_alpha, spike_regime_summary, stream_seed, sweep_records)
from laplacelab.geometry import draw_sample, separation_radii
from laplacelab.records import SweepRecord, read_records

GRID_TEXT = '''
# small grid
d_list = 1, 3
n_list = 10,20   # two sizes
c_rule = absolute
c_values = 0.5, 2
seeds = 1
f0 = gauss_bump
m_test = 500
'''

BAD_GRIDS = [
    'n_list =',
    'd_list = 2',
    'colour = blue',
    'n_list 10',
    'c_rule = loose',
    'm_test = many',
    'c_values = 0, 1'
]

BANDWIDTHS = [
    # c_rule, d, n, value, expected c
    ('scaled', 1, 100, 2.0, 200.0),
    ('scaled', 3, 1000, 0.5, 5.0),
    ('absolute', 3, 1000, 0.5, 0.5),
    ('sqrt_d', 3, 1000, 2.0, 2 * sqrt(3))
]

SMALL = SweepGrid(d_list=(1,), n_list=(10, 20), c_rule='absolute',
    c_values=(1.0, 4.0), seeds=(1, 2), m_test=500)

def synthetic(overrides):
    base = run_cell(SweepGrid(d_list=(1,), n_list=(10,), c_rule='absolute',
        c_values=(1.0,), seeds=(1,), m_test=200), 1, 10, 1.0, 1)
    return [replace(base, **override) for override in overrides]

class TestGrid(unittest.TestCase):

    def test_parse(self):
        grid = parse_grid(GRID_TEXT)
        self.assertEqual(grid.d_list, (1, 3))
        self.assertEqual(grid.n_list, (10, 20))
        self.assertEqual(grid.c_values, (0.5, 2.0))
        self.assertEqual(grid.f0, 'gauss_bump')
        self.assertEqual(grid.m_test, 500)
        self.assertEqual(grid.alpha_witness, 0.4)
        self.assertEqual(len(grid.cells()), 8)

    def test_bad_grids(self):
        for text in BAD_GRIDS:
            with self.assertRaises(UsageError):
                parse_grid(text)

    def test_load(self):
        with TemporaryDirectory() as directory:
            path = Path(directory) / 'grid.txt'
            path.write_text(GRID_TEXT, encoding='utf-8')
            self.assertEqual(load_grid(path), parse_grid(GRID_TEXT))
            with self.assertRaises(UsageError):
                load_grid(Path(directory) / 'nothing.txt')

    def test_bandwidth(self):
        for case in BANDWIDTHS:
            grid = SweepGrid(c_rule=case[0])
            self.assertAlmostEqual(grid.bandwidth(*case[1:4]), case[4],
                places=10)

    def test_digest(self):
        self.assertEqual(SweepGrid().digest, SweepGrid().digest)
        self.assertNotEqual(SweepGrid().digest, SweepGrid(m_test=100).digest)
        self.assertEqual(len(SweepGrid().digest), 64)

    def test_stream_seed(self):
        self.assertEqual(stream_seed(3, 1, 10), stream_seed(3, 1, 10))
        self.assertNotEqual(stream_seed(3, 1, 10), stream_seed(3, 1, 20))

class TestCell(unittest.TestCase):

    def test_smoke(self):
        grid = SweepGrid(d_list=(1,), n_list=(10,), c_rule='absolute',
            c_values=(1.0,), seeds=(1,), m_test=2000)
        record = run_cell(grid, 1, 10, 1.0, 1)
        self.assertFalse(record.failed)
        for field in fields(SweepRecord):
            value = getattr(record, field.name)
            if isinstance(value, float):
                self.assertTrue(isfinite(value), field.name)
        self.assertEqual(record.grid_hash, grid.digest)

    def test_seed_dependence(self):
        first = run_cell(SMALL, 1, 10, 4.0, 1)
        second = run_cell(SMALL, 1, 10, 4.0, 2)
        self.assertEqual((first.d, first.n, first.c), (second.d, second.n,
            second.c))
        self.assertNotEqual(first.risk_mean, second.risk_mean)

    def test_deterministic(self):
        self.assertEqual(run_cell(SMALL, 1, 20, 1.0, 2),
            run_cell(SMALL, 1, 20, 1.0, 2))

    def test_ridge(self):
        record = run_cell(replace(SMALL, ridge=0.01), 1, 10, 1.0, 1)
        self.assertFalse(record.failed)
        self.assertTrue(np.isnan(record.certificate))
        self.assertGreater(record.residual_max, 1e-6)

    def test_witness_alpha(self):
        sample = draw_sample(50, 1, 'const_one', 3)
        radii = separation_radii(sample.points)
        alpha = search_witness_alpha(sample, radii, 'const_one')
        self.assertLessEqual(witness_l2_norm_sq(
            build_witness(sample, radii, alpha)), 2.0 / 3)
        self.assertEqual(np.log2(0.4 / alpha) % 1, 0.0)

class TestSweep(unittest.TestCase):

    def test_jobs_do_not_matter(self):
        with TemporaryDirectory() as directory:
            serial = Path(directory) / 'serial.csv'
            parallel = Path(directory) / 'parallel.csv'
            self.assertEqual(run_sweep(SMALL, serial, jobs=1), 8)
            self.assertEqual(run_sweep(SMALL, parallel, jobs=2), 8)
            self.assertEqual(serial.read_bytes(), parallel.read_bytes())
            records = read_records(serial)
            self.assertEqual([r.coordinates for r in records],
                sorted(r.coordinates for r in records))

    def test_unwritable(self):
        with TemporaryDirectory() as directory:
            with self.assertRaises(SinkError):
                run_sweep(SMALL, Path(directory) / 'no' / 'out.json')

    def test_records_returned_as_written(self):
        grid = replace(SMALL, n_list=(10,), seeds=(1,))
        with TemporaryDirectory() as directory:
            out = Path(directory) / 'out.csv'
            records = sweep_records(grid, out)
            self.assertEqual(len(records), 2)
            self.assertEqual([r.coordinates for r in read_records(out)],
                [r.coordinates for r in records])
            with self.assertRaises(UsageError):
                sweep_records(grid, out, jobs=0)

class TestSummaries(unittest.TestCase):

    def test_flat_risk(self):
        records = synthetic([{'n': n, 'c_multiplier': value, 'seed': seed,
            'risk_mean': 0.3} for n in (10, 20, 40) for value in (1.0, 2.0)
            for seed in (1, 2)])
        summary = inconsistency_summary(records)
        self.assertEqual(len(summary.rows), 3)
        for row in summary.rows:
            self.assertAlmostEqual(row.min_risk, 0.3)
            self.assertEqual((row.band_low, row.band_high), (0.3, 0.3))
        self.assertEqual(summary.trends, {1: 0.0})

    def test_minimum_over_c(self):
        records = synthetic([
            {'c_multiplier': 1.0, 'seed': 1, 'risk_mean': 0.5},
            {'c_multiplier': 1.0, 'seed': 2, 'risk_mean': 0.7},
            {'c_multiplier': 2.0, 'seed': 1, 'risk_mean': 0.2},
            {'c_multiplier': 2.0, 'seed': 2, 'risk_mean': 0.4}])
        row = inconsistency_summary(records).row(1, 10)
        self.assertAlmostEqual(row.min_risk, 0.3)
        self.assertEqual((row.band_low, row.band_high), (0.2, 0.4))
        self.assertEqual(row.best_c_multiplier, 2.0)

    def test_jitter_excluded(self):
        records = synthetic([
            {'c_multiplier': 1.0, 'risk_mean': 0.5},
            {'c_multiplier': 2.0, 'risk_mean': 0.6},
            {'c_multiplier': 4.0, 'risk_mean': 0.01, 'jitter_used': 1e-12}])
        summary = inconsistency_summary(records)
        self.assertEqual(summary.excluded, [(1, 10, 4.0, 1)])
        self.assertAlmostEqual(summary.rows[0].min_risk, 0.5)

    def test_single_bandwidth(self):
        records = synthetic([{'seed': 1}, {'seed': 2}])
        with self.assertRaises(SummaryError):
            inconsistency_summary(records)
        with self.assertRaises(SummaryError):
            spike_regime_summary(records)

    def test_spike_ratio(self):
        records = synthetic([{'c_multiplier': value,
            'l2_f0': 2.0, 'l2_fhat_mean': 2.0 / value}
            for value in (1.0, 4.0)])
        rows = spike_regime_summary(records)
        self.assertEqual([r.c_multiplier for r in rows], [1.0, 4.0])
        self.assertAlmostEqual(rows[0].ratio, 1.0)
        self.assertAlmostEqual(rows[1].ratio, 0.25)

    def test_gate_flags(self):
        records = synthetic([{'n': n, 'c': value * n, 'c_multiplier': value,
            'risk_mean': risk, 'l2_f0': 2.0, 'l2_fhat_mean': 2.0 * ratio}
            for n, risk in ((10, 0.3), (20, 0.2), (40, 0.01))
            for value, ratio in ((1.0, 0.9), (32.0, 0.5))])
        summary = inconsistency_summary(records)
        self.assertEqual([row.passed for row in summary.rows],
            [True, True, False])
        self.assertFalse(summary.trend_passed(1))
        self.assertFalse(summary.passed)
        spikes = spike_regime_summary(records)
        self.assertEqual([row.gated for row in spikes], [False, True] * 3)
        self.assertFalse(any(row.passed for row in spikes if row.gated))
        text = format_summary(summary, spikes)
        self.assertIn('trend d=1: spearman -1.000  FAIL', text)
        self.assertEqual(text.count('FAIL'), 5)
        self.assertEqual(text.count(' ok'), 2)

    def test_absolute_rows_not_gated(self):
        records = synthetic([{'c_multiplier': 32.0, 'c': 32.0,
            'l2_f0': 1.0, 'l2_fhat_mean': 0.9}, {'c_multiplier': 1.0}])
        spikes = spike_regime_summary(records)
        self.assertFalse(spikes[1].scaled)
        self.assertTrue(all(row.passed and not row.gated for row in spikes))


    def test_collect_canonical_order(self):
        records = collect_records(replace(SMALL, n_list=(20, 10),
            seeds=(2, 1)))
        self.assertEqual(records[0].coordinates, (1, 10, 1.0, 1))

if __name__ == '__main__':
    unittest.main()
