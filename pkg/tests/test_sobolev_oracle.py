import unittest
from math import inf

import numpy as np

from laplacelab.bump import build_witness, witness_convention_norm
from laplacelab.errors import ParameterError, ResolutionError, TruncationError
from laplacelab.geometry import SampleSet, draw_sample
from laplacelab.kernel import KernelConfig
from laplacelab.risk import zero_function
from laplacelab.setting import GRID_DEFAULT_POINTS, GRID_MAX_POINTS
from laplacelab.sobolev_oracle import (fourier_convention_norm_1d,
    l2_norm_sq_1d, min_gap_1d, render_on_grid, resolving_points,
    verify_prop_a1)

def laplace(x):
    return np.exp(-np.abs(x[:, 0]))

def labelled(points, targets):
    targets = np.asarray(targets, dtype=float)
    return SampleSet(np.asarray(points, dtype=float).reshape(-1, 1), targets,
        np.zeros_like(targets), 'const_one')

def fifty_points(tight_pair=False):
    """Alternating labels on an even spread; tight_pair puts one point
    0.002 from the middle."""
    points = np.linspace(-0.98, 0.98, 50)
    if tight_pair:
        points = np.append(np.linspace(-0.98, 0.98, 49), 0.002)
    return labelled(points, 2.0 * (np.arange(50) % 2))

RANDOM_INSTANCES = [
    # c, label seed
    (0.5, 1),
    (2.0, 2),
    (8.0, 3)
]

SPREAD = [-0.9, -0.55, -0.3, -0.02, 0.2, 0.41, 0.7, 0.95]

class TestGridNorm(unittest.TestCase):

    def test_zero(self):
        grid = render_on_grid(zero_function, 4.0, 2 ** 10)
        self.assertEqual(fourier_convention_norm_1d(grid, 1.0), 0.0)

    def test_laplace_pair(self):
        # F e^{-|x|} = sqrt(2/π) / (1 + p²)
        grid = render_on_grid(laplace, 40.0, 2 ** 18)
        self.assertAlmostEqual(fourier_convention_norm_1d(grid, 1.0), 2.0,
            delta=0.04)
        self.assertAlmostEqual(l2_norm_sq_1d(grid), 1.0, delta=1e-3)

    def test_truncation(self):
        grid = render_on_grid(laplace, 2.0, 2 ** 10)
        with self.assertRaises(TruncationError) as raised:
            fourier_convention_norm_1d(grid, 1.0)
        self.assertGreater(raised.exception.edge_magnitude, 0.1)

    def test_grid_size(self):
        with self.assertRaises(ParameterError):
            render_on_grid(laplace, 40.0, 1000)
        with self.assertRaises(ParameterError):
            render_on_grid(laplace, -1.0, 1024)

    def test_witness(self):
        sample = labelled([[-0.5], [0.5]], [2.0, -1.0])
        for shape in ('paper', 'smooth'):
            witness = build_witness(sample, [0.5, 0.5], 0.4, shape)
            grid = render_on_grid(witness, 2.0, 2 ** 18)
            cfg = KernelConfig(1, 2.0)
            self.assertAlmostEqual(fourier_convention_norm_1d(grid, 2.0)
                / witness_convention_norm(witness, cfg), 1.0, delta=1e-3)

class TestVerifyPropA1(unittest.TestCase):

    def test_single_point(self):
        report = verify_prop_a1(labelled([[0.0]], [1.0]), 1.0)
        self.assertAlmostEqual(report.ratio, 1.0, delta=0.02)
        self.assertAlmostEqual(report.kernel_norm, 2.0, places=12)
        self.assertFalse(report.exact_zero)

    def test_random_labels(self):
        for case in RANDOM_INSTANCES:
            targets = np.random.default_rng(case[1]).normal(size=len(SPREAD))
            report = verify_prop_a1(labelled(SPREAD, targets), case[0])
            self.assertAlmostEqual(report.ratio, 1.0, delta=0.02)
            self.assertLessEqual(report.edge_magnitude, 1e-7)

    def test_refinement(self):
        sample = labelled(SPREAD, [1.0, -0.5, 2.0, 0.0, 1.5, -1.0, 0.5, 1.0])
        errors = [abs(verify_prop_a1(sample, 2.0, 25.0, m).ratio - 1)
            for m in (2 ** 14, 2 ** 16, 2 ** 18)]
        self.assertLessEqual(errors[1], errors[0])
        self.assertLessEqual(errors[2], errors[1])

    def test_fifty_points_small_bandwidth(self):
        report = verify_prop_a1(fifty_points(), 0.5)
        self.assertEqual(report.m, GRID_DEFAULT_POINTS)
        self.assertAlmostEqual(report.min_gap, 0.04, places=12)
        self.assertAlmostEqual(report.ratio, 1.0, delta=0.02)

    def test_tight_pair_refines_grid(self):
        report = verify_prop_a1(fifty_points(tight_pair=True), 0.5)
        self.assertEqual(report.m, GRID_MAX_POINTS)
        self.assertAlmostEqual(report.ratio, 1.0, delta=0.02)

    def test_unresolvable_pair(self):
        with self.assertRaises(ResolutionError) as raised:
            verify_prop_a1(labelled([0.0, 1e-5], [0.0, 1.0]), 1.0)
        self.assertAlmostEqual(raised.exception.min_gap, 1e-5)
        self.assertGreater(raised.exception.finest_spacing, 1e-5 / 32)

    def test_exact_zero(self):
        report = verify_prop_a1(labelled([[0.1], [0.6]], [0.0, 0.0]), 2.0,
            m=2 ** 12)
        self.assertTrue(report.exact_zero)
        self.assertEqual(report.ratio, 1.0)
        self.assertEqual(report.kernel_norm, 0.0)

    def test_dimension(self):
        with self.assertRaises(ParameterError):
            verify_prop_a1(draw_sample(5, 3, 'const_one', 1), 1.0)

class TestGridSize(unittest.TestCase):

    def test_min_gap(self):
        self.assertAlmostEqual(min_gap_1d([0.3, -0.5, -0.499]), 1e-3)
        self.assertEqual(min_gap_1d([0.3]), inf)

    def test_resolving_points(self):
        spread = labelled(SPREAD, np.ones(8))
        self.assertEqual(resolving_points(spread, 10.0), GRID_DEFAULT_POINTS)
        close = labelled([-0.5, -0.499, 0.3], np.ones(3))
        self.assertEqual(resolving_points(close, 10.0), 2 ** 20)
        with self.assertRaises(ResolutionError):
            resolving_points(labelled([0.0, 1e-6], np.ones(2)), 10.0)

if __name__ == '__main__':
    unittest.main()
