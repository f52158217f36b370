"""End-to-end checks of the homogenization, corrector and large deviation results.

Statistical checks that take minutes run only with HOMOGLDP_SLOW=1.
"""
import math
import os
import unittest

import numpy as np
from scipy import stats

from homogldp import corrector, ldp, media, montecarlo, solver
from homogldp.config import ExperimentConfig
from homogldp.entities import ConvolvedCoarse, CorrectorSpec, CramerKind, MediaModel, SourceSpec, Tilt
from homogldp.rng import Rng

SLOW = os.environ.get('HOMOGLDP_SLOW') == '1'
UNIT = MediaModel(ConvolvedCoarse(1))
SOURCE = SourceSpec()
X = 0.5

def mild_model():
    return ExperimentConfig.for_figure('mild_ldp').media_model()

class TestCramerOracle(unittest.TestCase):
    def test_linear_convergence_in_epsilon(self):
        # x = 1/3 cuts one cell at the same fraction for 1/32 and 1/128
        lam = np.array([0.0, 0.0, 0.2, 0.0])
        cf = ldp.cramer_functional(UNIT, SOURCE, 1 / 3)
        limit = ldp.cramer_full(cf, lam)
        gaps = [abs(ldp.cramer_prelimit(cf, lam, eps) - limit) for eps in (1 / 32, 1 / 64, 1 / 128)]
        self.assertTrue(3.5 <= gaps[0] / gaps[2] <= 4.5)
        self.assertLess(gaps[1], gaps[0])

class TestRateAnchors(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cf = ldp.cramer_functional(UNIT, SOURCE, X, CramerKind.APPROX_1D, panels=128)

    def approx(self, lam):
        return ldp.cramer_approx(self.cf, lam)

    def test_zero_at_homogenized_solution(self):
        self.assertLess(ldp.legendre_1d(self.approx, self.cf.u0).rate, 1e-8)
        full = ldp.cramer_functional(UNIT, SOURCE, X, panels=64)
        self.assertLess(ldp.rate_full(full, full.u0, starts=2).rate, 1e-6)

    def test_convex_and_monotone(self):
        u0 = self.cf.u0
        levels = u0 * np.linspace(0.5, 3.0, 50)
        curve = ldp.approx_rate_curve(self.cf, levels)
        finite = np.isfinite(curve.values)
        values = curve.values[finite]
        self.assertTrue(np.all(np.diff(values, 2) >= -1e-9))
        above = curve.values[finite & (curve.levels >= u0)]
        below = curve.values[finite & (curve.levels <= u0)]
        self.assertTrue(np.all(np.diff(above) >= -1e-12))
        self.assertTrue(np.all(np.diff(below) <= 1e-12))

    def test_matches_grid_search(self):
        grid = np.linspace(-100.0, 20.0, 100_000)
        values = np.array([self.approx(lam) for lam in grid])
        finite = np.isfinite(values)
        grid, values = grid[finite], values[finite]
        for ell in self.cf.u0 * np.linspace(0.5, 2.5, 10):
            with self.subTest(level=ell):
                brute = float(np.max(ell * grid - values))
                self.assertAlmostEqual(ldp.legendre_1d(self.approx, float(ell)).rate, brute, delta=1e-6)

class TestSteepness(unittest.TestCase):
    def test_both_families(self):
        parameterized = ldp.steepness_check(ldp.cramer_functional(mild_model(), SOURCE, X, panels=16))
        convolved = ldp.steepness_check(ldp.cramer_functional(UNIT, SOURCE, X, panels=16))
        self.assertTrue(parameterized.steep and parameterized.condition1)
        self.assertTrue(convolved.steep and convolved.condition2)

@unittest.skipUnless(SLOW, 'set HOMOGLDP_SLOW=1 to run statistical acceptance checks')
class TestHomogenizationRate(unittest.TestCase):
    def test_square_root_rate(self):
        grid = np.linspace(0.0, 1.0, 257)
        u0 = solver.solve_homogenized(UNIT, SOURCE, grid).values
        bound_scale = math.sqrt(0.1) * math.sqrt(media.covariance_integral(UNIT))
        epsilons = np.array([1 / 16, 1 / 64, 1 / 256])
        errors = []
        for eps in epsilons:
            stream = Rng.named(1, f'homogenization-{round(1 / eps)}')
            squares = [
                solver.l2_distance(solver.solve_path(UNIT, media.sample_fine(UNIT, eps, stream.substream(k)), SOURCE, grid).values, u0, grid) ** 2
                for k in range(400)
            ]
            errors.append(math.sqrt(np.mean(squares)))
            self.assertLess(errors[-1], 3 * math.sqrt(eps) * bound_scale)
        slope = np.polyfit(np.log(epsilons), np.log(errors), 1)[0]
        self.assertAlmostEqual(slope, 0.5, delta=0.1)

@unittest.skipUnless(SLOW, 'set HOMOGLDP_SLOW=1 to run statistical acceptance checks')
class TestCorrectorLimit(unittest.TestCase):
    def test_variance(self):
        eps = 0.01
        for name, model in (('parameterized', mild_model()), ('convolved', UNIT)):
            with self.subTest(family=name):
                samples = montecarlo.run_samples(model, SOURCE, eps, X, 20_000, Tilt(), Rng.named(2, name), threads=4)
                expected = corrector.corrector_variance(CorrectorSpec(model), X)
                self.assertAlmostEqual(np.var(samples.values, ddof=1) / eps / expected, 1.0, delta=0.1)

    def test_gaussian_law(self):
        eps = 0.01
        samples = montecarlo.run_samples(UNIT, SOURCE, eps, X, 10_000, Tilt(), Rng.named(3, 'clt'), threads=4)
        standardized = (samples.values - 0.02375) / math.sqrt(eps)
        c_c = corrector.corrector_variance(CorrectorSpec(UNIT), X)
        self.assertLess(stats.kstest(standardized, stats.norm(0.0, math.sqrt(c_c)).cdf).statistic, 0.03)

@unittest.skipUnless(SLOW, 'set HOMOGLDP_SLOW=1 to run statistical acceptance checks')
class TestLargeDeviations(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        eps = 0.01
        cls.cf = ldp.cramer_functional(UNIT, SOURCE, X, CramerKind.APPROX_1D)
        cls.c_c = corrector.corrector_variance(CorrectorSpec(UNIT), X)
        u0 = cls.cf.u0
        levels = np.linspace(u0 + 3 * math.sqrt(eps * cls.c_c), 4 * u0, 8)
        cls.rate, _ = montecarlo.run_empirical(UNIT, SOURCE, eps, X, 1_000_000, levels, Rng.named(4, 'ldp'), threads=8)
        cls.valid = cls.rate.ess >= 100

    def test_matches_approximate_rate(self):
        self.assertTrue(np.any(self.valid))
        for ell, value in zip(self.rate.levels[self.valid], self.rate.neg_values[self.valid]):
            expected = ldp.legendre_1d(lambda lam: ldp.cramer_approx(self.cf, lam), float(ell)).rate
            self.assertAlmostEqual(value / expected, 1.0, delta=0.2)

    def test_gaussian_rate_fails_in_the_tail(self):
        index = np.flatnonzero(self.valid)[-1]
        ell, value = self.rate.levels[index], self.rate.neg_values[index]
        gaussian = corrector.gaussian_rate(self.cf.u0, self.c_c, float(ell))
        self.assertGreater(abs(gaussian / value - 1.0), 0.3)

@unittest.skipUnless(SLOW, 'set HOMOGLDP_SLOW=1 to run statistical acceptance checks')
class TestChernoffValidity(unittest.TestCase):
    def test_bound_dominates_measured_tail(self):
        generator = Rng.named(5, 'chernoff-pairs').generator()
        u0 = 0.02375
        c_c = corrector.corrector_variance(CorrectorSpec(UNIT), X)
        for k in range(20):
            eps = float(generator.choice([0.1, 0.05, 0.02]))
            ell = u0 + float(generator.uniform(0.5, 2.5)) * math.sqrt(eps * c_c)
            samples = montecarlo.run_samples(
                UNIT, SOURCE, eps, X, 20_000, Tilt(), Rng.named(5, f'chernoff-{k}'), quantity='linearized', threads=4
            )
            tail = float(np.mean(samples.values >= ell))
            with self.subTest(epsilon=eps, level=ell):
                self.assertGreater(tail, 0.0)
                self.assertGreaterEqual(ldp.chernoff_bound(UNIT, SOURCE, X, eps, ell), eps * math.log(tail))
