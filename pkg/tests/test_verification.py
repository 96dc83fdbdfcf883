import unittest
from dataclasses import replace
from unittest import mock

from laplacelab.experiments import run_cell, SweepGrid
from laplacelab.verification import (SUITES, CheckResult,
    check_interpolation, check_lambda_closed_form, check_min_norm_optimality,
    check_packing_bound, check_fourier_norm, check_scaling_slopes,
    check_spike_closed_form, check_sweep_records, check_witness_closed_forms,
    format_checks, run_checks)

QUICK_CHECKS = [
    (check_lambda_closed_form, {}),
    # the third instance is n = 50 at c = 0.5
    (check_fourier_norm, {'instances': 4, 'cs': (0.5, 8.0), 'ns': (10, 50)}),
    (check_min_norm_optimality, {'instances': 6}),
    (check_witness_closed_forms, {'instances': 4}),
    (check_packing_bound, {'configs': 40}),
    (check_scaling_slopes, {'ns': (200, 800, 3200), 'seeds': 4}),
    (check_interpolation, {'instances': 10}),
    (check_spike_closed_form, {})
]

def gated_records(risks, spike_ratio, spike_multiplier=32.0):
    """Two scaled bandwidths per n, the larger one in the spike regime."""
    base = run_cell(SweepGrid(d_list=(1,), n_list=(10,), c_rule='absolute',
        c_values=(1.0,), seeds=(1,), m_test=200), 1, 10, 1.0, 1)
    return [replace(base, n=n, c=value * n, c_multiplier=value,
        risk_mean=risk, l2_f0=1.0, l2_fhat_mean=ratio)
        for n, risk in risks
        for value, ratio in ((1.0, 1.0), (spike_multiplier, spike_ratio))]

def broken_suite(seed):
    raise ZeroDivisionError('float division by zero')

class TestChecks(unittest.TestCase):

    def test_quick_suites(self):
        for case in QUICK_CHECKS:
            result = case[0](1, **case[1])
            self.assertIsInstance(result, CheckResult)
            self.assertTrue(result.passed, result.detail)

    def test_fourier_detail(self):
        result = check_fourier_norm(2, instances=1, cs=(0.5,), ns=(50,))
        self.assertTrue(result.passed, result.detail)
        self.assertIn('0 unresolved', result.detail)

    def test_run_checks(self):
        results = run_checks(['lambda'])
        self.assertEqual([r.name for r in results], ['lambda closed form'])
        table = format_checks(results)
        self.assertIn('PASS', table)

    def test_suite_exception_is_a_failure(self):
        with mock.patch.dict(SUITES, {'broken': broken_suite}):
            with self.assertLogs('laplacelab.verification', 'ERROR'):
                results = run_checks(['broken', 'lambda'])
        self.assertEqual([r.passed for r in results], [False, True])
        self.assertIn('ZeroDivisionError', results[0].detail)

    def test_suite_names(self):
        self.assertEqual(sorted(SUITES), ['fourier', 'interpolation',
            'lambda', 'optimality', 'packing', 'slopes', 'spike', 'witness'])

class TestSweepRecords(unittest.TestCase):

    def test_all_gates_pass(self):
        records = gated_records([(10, 0.3), (20, 0.3), (40, 0.35)], 0.02)
        results = check_sweep_records(records)
        self.assertEqual([r.name for r in results],
            ['risk floor', 'risk trend', 'spike regime'])
        self.assertTrue(all(r.passed for r in results),
            format_checks(results))

    def test_risk_below_floor(self):
        results = check_sweep_records(
            gated_records([(10, 0.3), (20, 0.01), (40, 0.3)], 0.02))
        self.assertEqual([r.passed for r in results], [False, True, True])
        self.assertIn('(d=1, n=20)', results[0].detail)

    def test_decreasing_risk(self):
        results = check_sweep_records(
            gated_records([(10, 0.5), (20, 0.3), (40, 0.1)], 0.02))
        self.assertEqual([r.passed for r in results], [True, False, True])
        self.assertIn('d=1 -1.000', results[1].detail)

    def test_spike_ratio_too_large(self):
        results = check_sweep_records(
            gated_records([(10, 0.3), (20, 0.3), (40, 0.35)], 0.5))
        self.assertEqual([r.passed for r in results], [True, True, False])
        self.assertIn('(d=1, n=10) 0.5000', results[2].detail)

    def test_no_spike_cells(self):
        results = check_sweep_records(
            gated_records([(10, 0.3), (20, 0.4)], 0.02, spike_multiplier=2.0))
        self.assertEqual([r.passed for r in results], [True, True, False])
        self.assertIn('no cells', results[2].detail)

    def test_unusable_records(self):
        results = check_sweep_records(gated_records([(10, 0.3)], 0.02)[:1])
        self.assertEqual(len(results), 1)
        self.assertFalse(results[0].passed)

if __name__ == '__main__':
    unittest.main()
