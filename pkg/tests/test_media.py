import math
import unittest

import numpy as np
from scipy import integrate

from homogldp import media
from homogldp.constants import COEFF_MAX, COEFF_MIN, N_MODES
from homogldp.entities import ConvolvedCoarse, MediaFamily, MediaModel, ParameterizedCoarse
from homogldp.errors import DomainError
from homogldp.rng import Rng

ALTERNATING = tuple((-1.0) ** m for m in range(N_MODES))

class TestCoarseField(unittest.TestCase):
    def test_floor(self):
        coarse = ParameterizedCoarse((-1.0,) + (0.0,) * 7)
        values = media.coarse_field(coarse, np.linspace(0.0, 1.0, 101))
        self.assertAlmostEqual(float(np.min(values)), 17 / 32)

    def test_coefficient_stays_in_bounds(self):
        generator = Rng.named(11, 'bounds').generator()
        for _ in range(200):
            coarse = ParameterizedCoarse(tuple(generator.uniform(-1.0, 1.0, N_MODES)))
            x = generator.random(50)
            theta = generator.uniform(-1.0, 1.0, 50)
            values = media.coarse_field(coarse, x) + coarse.nu_b * theta
            self.assertTrue(np.all(values >= COEFF_MIN - 1e-12))
            self.assertTrue(np.all(values <= COEFF_MAX + 1e-12))

class TestParameterizedBounds(unittest.TestCase):
    def test_extreme_draw_reaches_upper_bound(self):
        lower, upper = media.parameterized_bounds(ParameterizedCoarse(ALTERNATING))
        self.assertAlmostEqual(upper, COEFF_MAX, places=9)
        self.assertGreaterEqual(lower, COEFF_MIN)

class TestGeometric(unittest.TestCase):
    def test_support_starts_at_one(self):
        self.assertEqual(media.geometric_from_uniform(0.0), 1)

    def test_quantiles(self):
        # P[X <= 2] = 1 - 0.8^2 = 0.36
        self.assertEqual(media.geometric_from_uniform(0.35), 2)
        self.assertEqual(media.geometric_from_uniform(0.37), 3)

class TestSampleCoarse(unittest.TestCase):
    def test_reproducible(self):
        first = media.sample_coarse('parameterized', Rng.named(5, 'coarse'))
        second = media.sample_coarse('parameterized', Rng.named(5, 'coarse'))
        self.assertEqual(first, second)

    def test_convolved_box(self):
        model = media.sample_coarse(MediaFamily.CONVOLVED, Rng(3), h_norm=2.0, kappa=4)
        self.assertEqual(model.coarse.kappa, 4)
        self.assertAlmostEqual(model.coarse.h_norm, 2.0)
        self.assertGreaterEqual(model.coarse.xi, 1)

class TestCellsFor(unittest.TestCase):
    def test_non_integer_inverse(self):
        with self.assertRaises(DomainError):
            media.cells_for(0.3)

class TestDrawBeta(unittest.TestCase):
    def test_tilted_mean(self):
        generator = Rng.named(1, 'beta').generator()
        draws = media.draw_beta(generator, 1, 200_000, eta=0.2)
        standard_error = draws.std() / math.sqrt(draws.size)
        self.assertLess(abs(draws.mean() - 1 / 0.6), 3 * standard_error)

    def test_eta_domain(self):
        with self.assertRaises(DomainError):
            media.draw_beta(np.random.default_rng(0), 1, 3, eta=0.5)

class TestSampleFine(unittest.TestCase):
    def test_convolved_window(self):
        model = MediaModel(ConvolvedCoarse(2, (0.5, 0.3, 0.2)))
        realization = media.sample_fine(model, 0.1, Rng(9))
        self.assertEqual(realization.n_cells, 10)
        self.assertEqual(len(realization.beta_window), 12)
        beta = realization.beta_window
        self.assertAlmostEqual(realization.inv_cells[0], 0.5 * beta[2] + 0.3 * beta[1] + 0.2 * beta[0])

    def test_parameterized_theta(self):
        model = MediaModel(ParameterizedCoarse((0.0,) * N_MODES))
        realization = media.sample_fine(model, 0.01, Rng(9))
        self.assertEqual(realization.n_cells, 100)
        self.assertTrue(np.all(np.abs(realization.inv_cells) <= 1.0))

class TestInvCoeffAt(unittest.TestCase):
    def test_convolved_cell_values(self):
        model = MediaModel(ConvolvedCoarse(1))
        realization = media.sample_fine(model, 0.25, Rng(4))
        values = media.inv_coeff_at(model, realization, np.array([0.1, 0.3, 0.6, 0.9]))
        self.assertTrue(np.array_equal(values, realization.inv_cells))

    def test_parameterized_value(self):
        model = MediaModel(ParameterizedCoarse((0.0,) * N_MODES))
        realization = media.sample_fine(model, 0.5, Rng(4))
        expected = 1.0 / (1.0 + 0.5 * realization.inv_cells[1])
        self.assertAlmostEqual(media.inv_coeff_at(model, realization, 0.75), expected)

class TestValphaMoments(unittest.TestCase):
    def test_against_quadrature(self):
        alpha, nu_b = 0.8, 0.5
        density = lambda v: 1.0 / (2.0 * nu_b * v ** 2)
        lo, hi = 1 / (alpha + nu_b), 1 / (alpha - nu_b)
        mean = integrate.quad(lambda v: v * density(v), lo, hi)[0]
        second = integrate.quad(lambda v: v ** 2 * density(v), lo, hi)[0]
        result = media.valpha_moments(alpha, nu_b)
        self.assertAlmostEqual(result[0], mean, places=10)
        self.assertAlmostEqual(result[1], second, places=10)

    def test_deterministic_limit(self):
        self.assertEqual(media.valpha_moments(2.0, 0.0), (0.5, 0.25))

    def test_domain(self):
        with self.assertRaises(DomainError):
            media.valpha_moments(0.5, 0.5)

class TestSigmaSq(unittest.TestCase):
    def test_unit_coarse_field(self):
        model = MediaModel(ParameterizedCoarse((0.0,) * N_MODES))
        self.assertAlmostEqual(media.sigma_sq(model, 0.3), 4 / 3 - math.log(3) ** 2, places=12)

class TestCovarianceIntegral(unittest.TestCase):
    def test_box_kernel(self):
        model = MediaModel(ConvolvedCoarse.box(3, h_norm=1.0, kappa=2))
        self.assertAlmostEqual(media.covariance_integral(model), 6.0)

class TestMediaConfig(unittest.TestCase):
    def test_round_trip(self):
        for model in (
            MediaModel(ParameterizedCoarse(ALTERNATING, nu_b=0.25)),
            MediaModel(ConvolvedCoarse(3, (0.2, 0.8)))
        ):
            self.assertEqual(media.media_from_config(media.media_to_config(model)), model)

    def test_prior_draw_needs_stream(self):
        with self.assertRaises(DomainError):
            media.media_from_config({'family': 'convolved'})
