import unittest

import numpy as np
from scipy import integrate

from homogldp import solver
from homogldp.constants import N_MODES
from homogldp.entities import (
    ConvolvedCoarse,
    FieldRealization,
    MediaModel,
    ParameterizedCoarse,
    SourceSpec
)
from homogldp.errors import DomainError
from homogldp.media import homogenized_coeff, sample_fine
from homogldp.rng import Rng

UNIT = MediaModel(ConvolvedCoarse(1))
SMOOTH = MediaModel(ParameterizedCoarse((0.3, -0.2, 0.2, 0.0, 0.1, -0.1, 0.0, 0.2)))
SOURCE = SourceSpec()

class TestAntiderivative(unittest.TestCase):
    def test_vectorized(self):
        values = solver.antiderivative(SOURCE, np.array([0.0, 0.45, 0.5, 0.55, 0.9]))
        self.assertTrue(np.allclose(values, [0.0, 0.0, 0.05, 0.1, 0.1]))

    def test_second_antiderivative_total(self):
        self.assertAlmostEqual(solver.second_antiderivative(SOURCE, 1.0), 0.05, places=14)

class TestHomogenized(unittest.TestCase):
    def test_midpoint_value(self):
        self.assertAlmostEqual(solver.homogenized_integrals(UNIT, SOURCE, 0.5).u0, 0.02375, places=14)

    def test_z_mean(self):
        integrals = solver.homogenized_integrals(UNIT, SOURCE, 0.5)
        self.assertTrue(np.allclose(integrals.z_mean(), [0.00125, 0.05, 0.5, 1.0]))

    def test_varying_coefficient_against_quad(self):
        inv = lambda s: 1.0 / homogenized_coeff(SMOOTH, s)
        flux = lambda s: solver.antiderivative(SOURCE, s) * inv(s)
        points = [0.45, 0.55]
        a = integrate.quad(inv, 0, 1, points=points, epsabs=1e-13)[0]
        b = integrate.quad(flux, 0, 1, points=points, epsabs=1e-13)[0]
        p = integrate.quad(inv, 0, 0.3, epsabs=1e-13)[0]
        q = integrate.quad(flux, 0, 0.3, epsabs=1e-13)[0]
        path = solver.solve_homogenized(SMOOTH, SOURCE, [0.0, 0.3, 1.0], tol=1e-12)
        self.assertAlmostEqual(path.values[1], -q + b / a * p, places=10)
        self.assertEqual(path.values[0], 0.0)
        self.assertEqual(path.values[-1], 0.0)

class TestSolvePoint(unittest.TestCase):
    def test_flat_medium_matches_homogenized(self):
        flat = MediaModel(ParameterizedCoarse((0.0,) * N_MODES, nu_b=0.0))
        realization = sample_fine(flat, 0.05, Rng(1))
        u = solver.solve_point(flat, realization, SOURCE, 0.5)
        self.assertAlmostEqual(u, 0.02375, places=13)

    def test_rejects_boundary_point(self):
        realization = FieldRealization(0.5, np.ones(2))
        with self.assertRaises(DomainError):
            solver.solve_point(UNIT, realization, SOURCE, 1.0)

    def test_batch_matches_single(self):
        realizations = [sample_fine(SMOOTH, 0.02, Rng(7, i)) for i in range(3)]
        cells = np.stack([r.inv_cells for r in realizations])
        batch = solver.solve_batch(SMOOTH, cells, SOURCE, 0.4, 0.02)
        single = [solver.solve_point(SMOOTH, r, SOURCE, 0.4) for r in realizations]
        self.assertTrue(np.allclose(batch, single, rtol=0, atol=1e-14))

    def test_gauss_order_converged(self):
        realizations = [sample_fine(SMOOTH, 0.01, Rng(13, k)) for k in range(100)]
        cells = np.stack([r.inv_cells for r in realizations])
        low = solver.solve_batch(SMOOTH, cells, SOURCE, 0.37, 0.01, order=8)
        high = solver.solve_batch(SMOOTH, cells, SOURCE, 0.37, 0.01, order=16)
        self.assertLess(float(np.max(np.abs(low - high))), 1e-10)

    def test_converges_to_homogenized(self):
        realization = sample_fine(UNIT, 0.001, Rng(3))
        u = solver.solve_point(UNIT, realization, SOURCE, 0.5)
        self.assertLess(abs(u - 0.02375), 0.01)

class TestExpansion(unittest.TestCase):
    def test_terms_add_up(self):
        realization = sample_fine(SMOOTH, 0.05, Rng(5))
        u = solver.solve_point(SMOOTH, realization, SOURCE, 0.5)
        v, r = solver.expansion_terms(SMOOTH, realization, SOURCE, 0.5)
        u0 = solver.homogenized_integrals(SMOOTH, SOURCE, 0.5).u0
        self.assertAlmostEqual(u, u0 + v + r, places=13)

    def test_first_order_term_is_green_integral(self):
        realization = sample_fine(UNIT, 0.05, Rng(6))
        panels = solver.cell_panels(0.05, SOURCE, 0.5, 8)
        inv = realization.inv_cells[panels.cell][:, None]
        green = solver.green_kernel(UNIT, SOURCE, 0.5, panels.nodes)
        expected = float(np.sum(panels.weights * green * (inv - 1.0)))
        v, _ = solver.expansion_terms(UNIT, realization, SOURCE, 0.5)
        self.assertAlmostEqual(v, expected, places=13)

    def test_linearized_point(self):
        realization = sample_fine(UNIT, 0.1, Rng(2))
        v, _ = solver.expansion_terms(UNIT, realization, SOURCE, 0.5)
        self.assertAlmostEqual(solver.linearized_point(UNIT, realization, SOURCE, 0.5), 0.02375 + v, places=14)

class TestGreenKernel(unittest.TestCase):
    def test_branches(self):
        # x = 1/2 splits 1/A₀ evenly so both branches are ∓(F − b/a)/2
        values = solver.green_kernel(UNIT, SOURCE, 0.5, np.array([0.2, 0.8]))
        self.assertTrue(np.allclose(values, [0.025, 0.025]))

    def test_integral_is_homogenized_solution(self):
        # a constant shift c of 1/A scales u by 1 + c
        s = np.linspace(0.0, 1.0, 200_001)
        total = integrate.trapezoid(solver.green_kernel(UNIT, SOURCE, 0.3, s), s)
        self.assertAlmostEqual(total, 0.015, places=6)

class TestSolvePath(unittest.TestCase):
    def test_matches_point_solver(self):
        realization = sample_fine(UNIT, 0.02, Rng(8))
        grid = np.linspace(0.0, 1.0, 11)
        path = solver.solve_path(UNIT, realization, SOURCE, grid)
        for x, value in zip(grid[1:-1], path.values[1:-1]):
            self.assertAlmostEqual(value, solver.solve_point(UNIT, realization, SOURCE, x), places=13)

    def test_boundary_values(self):
        realization = sample_fine(SMOOTH, 0.01, Rng(8))
        path = solver.solve_path(SMOOTH, realization, SOURCE, np.linspace(0.0, 1.0, 21))
        for column in (path.values, path.u0, path.v_eps, path.r_eps):
            self.assertEqual(column[0], 0.0)
            self.assertEqual(column[-1], 0.0)

    def test_components_add_up(self):
        realization = sample_fine(SMOOTH, 0.01, Rng(9))
        path = solver.solve_path(SMOOTH, realization, SOURCE, np.linspace(0.0, 1.0, 51))
        self.assertTrue(np.allclose(path.values, path.u0 + path.v_eps + path.r_eps, atol=1e-14))

    def test_unsorted_grid(self):
        with self.assertRaises(DomainError):
            solver.solve_path(UNIT, sample_fine(UNIT, 0.5, Rng(0)), SOURCE, [0.6, 0.2])

class TestL2Distance(unittest.TestCase):
    def test_linear_function(self):
        grid = np.linspace(0.0, 1.0, 2001)
        self.assertAlmostEqual(solver.l2_distance(grid, np.zeros_like(grid), grid), 3 ** -0.5, places=6)
