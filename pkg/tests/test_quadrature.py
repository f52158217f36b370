import math
import unittest

import numpy as np

from homogldp import quadrature
from homogldp.errors import NumericalError

class TestGaussLegendre(unittest.TestCase):
    def test_weights_sum_to_interval_length(self):
        _, weights = quadrature.gauss_legendre(8)
        self.assertAlmostEqual(float(weights.sum()), 2.0, places=14)

    def test_read_only(self):
        nodes, _ = quadrature.gauss_legendre(4)
        with self.assertRaises(ValueError):
            nodes[0] = 0.0

class TestPanelEdges(unittest.TestCase):
    def test_merges_close_points(self):
        edges = quadrature.panel_edges(0.5, 0.5 + 1e-16, n_uniform=4)
        self.assertEqual(edges.tolist(), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_rejects_points_outside(self):
        with self.assertRaises(NumericalError):
            quadrature.panel_edges(1.5)

class TestPanelRule(unittest.TestCase):
    def test_exact_for_cubic_on_panels(self):
        edges = quadrature.panel_edges(0.3, n_uniform=3)
        nodes, weights = quadrature.panel_rule(edges, 2)
        self.assertAlmostEqual(float(np.sum(weights * nodes ** 3)), 0.25, places=14)

    def test_kink_at_edge_is_exact(self):
        edges = quadrature.panel_edges(1 / 3)
        nodes, weights = quadrature.panel_rule(edges, 4)
        result = float(np.sum(weights * np.abs(nodes - 1 / 3)))
        self.assertAlmostEqual(result, (1 / 3) ** 2 / 2 + (2 / 3) ** 2 / 2, places=14)

class TestSimpson(unittest.TestCase):
    def test_polynomial(self):
        self.assertAlmostEqual(quadrature.simpson(lambda s: s ** 2, 0.0, 1.0), 1 / 3, places=12)

    def test_smooth_function(self):
        result = quadrature.simpson(np.exp, 0.0, 1.0, tol=1e-12)
        self.assertAlmostEqual(result, math.e - 1, places=10)

    def test_refines_where_the_integrand_is_rough(self):
        points = []

        def peak(s):
            points.append(s)
            return 1.0 / (1e-4 + (s - 0.3) ** 2)

        result = quadrature.simpson(peak, 0.0, 1.0, tol=1e-9)
        self.assertAlmostEqual(result, 100.0 * (math.atan(70.0) + math.atan(30.0)), places=6)
        s = np.concatenate(points)
        near = np.count_nonzero(np.abs(s - 0.3) < 0.05)
        far = np.count_nonzero(s > 0.6)
        self.assertGreater(near, 5 * far)

    def test_kink_off_the_dyadic_grid(self):
        self.assertAlmostEqual(quadrature.simpson(np.abs, -1.0, 2.0, tol=1e-10), 2.5, places=9)

    def test_failure_raises(self):
        with self.assertRaises(NumericalError):
            quadrature.simpson(lambda s: np.sin(1 / (s + 1e-9)), 0.0, 1.0, tol=1e-14, max_depth=6)

class TestIntegrateSegments(unittest.TestCase):
    def test_segments_add_up(self):
        edges = np.array([0.0, 0.45, 0.55, 1.0])
        parts = quadrature.integrate_segments(lambda s: np.ones_like(s), edges, 1e-12)
        self.assertTrue(np.allclose(parts, np.diff(edges)))
