import unittest
from math import exp, pi

import numpy as np

from laplacelab.errors import ParameterError
from laplacelab.geometry import (Domain, SampleSet, SeparationStats,
    draw_sample, find_target, separation_radii, separation_stats)
from laplacelab.interpolant import (Interpolant, SolverDiagnostics,
    fit_min_norm, fit_ridge)
from laplacelab.kernel import KernelConfig
from laplacelab.risk import (holder_certificate, local_residual_mass,
    mc_l2_norm_sq, mc_l2_risk, residual, target_norm_proxy, zero_function)

def labelled(points, targets, noise):
    return SampleSet(np.asarray(points, dtype=float),
        np.asarray(targets, dtype=float), np.asarray(noise, dtype=float),
        'const_one')

ZERO_RISKS = [
    # f0, d, expected E f_0(X)²
    ('const_one', 1, 1.0),
    ('const_one', 3, 1.0),
    ('coord_linear', 1, 1 / 3),
    ('coord_linear', 3, 0.2)
]

class TestRisk(unittest.TestCase):

    def test_zero_model(self):
        for case in ZERO_RISKS:
            estimate = mc_l2_risk(zero_function, case[0], Domain(case[1]),
                20000, 3)
            self.assertEqual(estimate.measure, 'population')
            self.assertLessEqual(abs(estimate.mean - case[2]),
                3 * estimate.std_error + 1e-12)

    def test_deterministic(self):
        model = fit_min_norm(KernelConfig(3, 5.0),
            draw_sample(50, 3, 'const_one', 1))
        first = mc_l2_risk(model, 'const_one', Domain(3), 5000, 9)
        second = mc_l2_risk(model, 'const_one', Domain(3), 5000, 9)
        self.assertEqual(first, second)

    def test_std_error_scaling(self):
        small = mc_l2_risk(zero_function, 'coord_linear', Domain(3), 5000, 4)
        large = mc_l2_risk(zero_function, 'coord_linear', Domain(3), 20000, 5)
        self.assertAlmostEqual(small.std_error / large.std_error, 2.0,
            delta=0.4)

    def test_too_few_points(self):
        with self.assertRaises(ParameterError):
            mc_l2_risk(zero_function, 'const_one', Domain(1), 1, 0)

class TestL2Norm(unittest.TestCase):

    def test_constant(self):
        estimate = mc_l2_norm_sq(find_target('const_one'), Domain(3), 1000, 2)
        self.assertAlmostEqual(estimate.mean, 4 * pi / 3, places=12)
        self.assertEqual(estimate.measure, 'lebesgue')

    def test_zero(self):
        self.assertEqual(mc_l2_norm_sq(zero_function, Domain(1), 100, 2).mean,
            0.0)

    def test_single_spike(self):
        # ∫_{-1}^{1} e^{-20|x|} dx = (1 - e^{-20}) / 10
        model = fit_min_norm(KernelConfig(1, 10.0),
            labelled([[0.0]], [1.0], [0.0]))
        estimate = mc_l2_norm_sq(model, Domain(1), 20000, 6)
        self.assertLessEqual(abs(estimate.mean - (1 - exp(-20)) / 10),
            3 * estimate.std_error)

    def test_population_and_lebesgue(self):
        sample = draw_sample(40, 1, 'const_one', 7)
        model = fit_min_norm(KernelConfig(1, 10.0), sample)
        risk = mc_l2_risk(model, 'const_one', Domain(1), 20000, 8)
        lebesgue = mc_l2_norm_sq(residual(model, 'const_one'), Domain(1),
            20000, 8)
        self.assertAlmostEqual(lebesgue.mean / 2, risk.mean, places=12)

class TestLocalMass(unittest.TestCase):

    def test_exact_model(self):
        sample = draw_sample(20, 3, 'const_one', 1)
        radii = separation_radii(sample.points)
        mass = local_residual_mass(find_target('const_one'), 'const_one',
            sample, radii, 0.5, 16, 2)
        self.assertEqual(mass, 0.0)

    def test_small_balls(self):
        # (f̂ - f_0)(X) = ξ = 1, so the mass tends to vol(ball) = β r
        sample = labelled([[0.0]], [2.0], [1.0])
        model = fit_min_norm(KernelConfig(1, 1.0), sample)
        mass = local_residual_mass(model, 'const_one', sample, [1.0], 0.01,
            64, 3)
        self.assertAlmostEqual(mass / 0.01, 1.0, delta=0.05)

    def test_below_full_norm(self):
        for seed in range(3):
            sample = draw_sample(20, 1, 'const_one', seed)
            model = fit_min_norm(KernelConfig(1, 5.0), sample)
            radii = separation_radii(sample.points)
            mass = local_residual_mass(model, 'const_one', sample, radii,
                0.5, 64, seed)
            full = mc_l2_norm_sq(residual(model, 'const_one'), Domain(1),
                20000, seed)
            self.assertLessEqual(mass, full.mean + 3 * full.std_error)

    def test_invalid(self):
        sample = labelled([[0.0]], [2.0], [1.0])
        with self.assertRaises(ParameterError):
            local_residual_mass(zero_function, 'const_one', sample, [1.0],
                1.0, 8, 0)
        with self.assertRaises(ParameterError):
            local_residual_mass(zero_function, 'const_one', sample, [1.0],
                0.5, 0, 0)

class TestCertificate(unittest.TestCase):

    def setUp(self):
        self.sample = labelled([[-0.5], [0.5]], [2.0, 0.0], [1.0, -1.0])
        self.stats = SeparationStats(np.array([0.5, 0.5]), True, {}, 1.0)
        self.cfg = KernelConfig(1, 1.0)
        self.flat = Interpolant(self.sample.points, np.zeros(2), self.cfg,
            0.0, SolverDiagnostics(0.0, 1.0, 0.0))

    def test_equal_radii(self):
        certificate = holder_certificate(self.flat, self.sample, self.stats,
            [0, 1], self.cfg, f0_norm_proxy=0.0)
        self.assertAlmostEqual(certificate.value, 1.0, places=14)
        self.assertAlmostEqual(certificate.clipped, 1.0, places=14)
        self.assertEqual(certificate.index_count, 2)

    def test_preconditions(self):
        with self.assertRaises(ParameterError):
            holder_certificate(self.flat, self.sample, self.stats, [],
                self.cfg, 0.0)
        ridge = fit_ridge(self.cfg, self.sample, 0.1)
        with self.assertRaises(ParameterError):
            holder_certificate(ridge, self.sample, self.stats, [0, 1],
                self.cfg, 0.0)

    def test_relabeling(self):
        sample = draw_sample(100, 3, 'const_one', 4)
        cfg = KernelConfig(3, 2.0 * 100 ** (1 / 3))
        model = fit_min_norm(cfg, sample)
        stats = separation_stats(sample.points)
        proxy = target_norm_proxy(sample, stats.radii, cfg)
        indices = np.arange(10, 60)
        forward = holder_certificate(model, sample, stats, indices, cfg, proxy)
        backward = holder_certificate(model, sample, stats, indices[::-1],
            cfg, proxy)
        self.assertAlmostEqual(forward.value / backward.value, 1.0,
            delta=1e-12)
        self.assertGreater(forward.value, 0.0)
        self.assertLessEqual(forward.clipped, 1.0)

if __name__ == '__main__':
    unittest.main()
