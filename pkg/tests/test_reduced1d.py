import unittest

import numpy as np
import pandas as pd

from fragcoag.exceptions import BranchError, CFLError, FragCoagInputException
from fragcoag.reduced1d import (GROW, REACH, SHRINK, GridHJBSolver, TerminalSpec, band, bstar, grid_dp_generalized, integrate_norm, m_flow,
                                m_flow_numeric, m_flow_uncorrected_denominator, optimal_action, optimal_branch, value_closed_form)

M_GRID = np.linspace(0.0, 3.99, 400)
B_GRID = np.linspace(0.0, 1.0, 64)


class TestNormFlow(unittest.TestCase):
    def test_m_flow(self):
        self.assertAlmostEqual(m_flow(1, 1, 0), np.e, places=12)
        self.assertAlmostEqual(m_flow(1, 1, 1), 0.5, places=12)
        self.assertAlmostEqual(m_flow(1, 1, 0.5), 1.0, places=12)
        self.assertAlmostEqual(m_flow(2, 3, 1), 3 / 7, places=12)
        self.assertEqual(m_flow(0.7, 0, 0.3), 0.0)
        np.testing.assert_allclose(m_flow(np.array([0.0, 1.0]), 1, 0), [1.0, np.e])

    def test_uncorrected_denominator(self):
        self.assertAlmostEqual(m_flow_uncorrected_denominator(1, 1, 0), np.e / (1 + np.e), places=12)
        # Finite at b = 1, with limit m0 / (1 + m0 (1 + t)) instead of m0 / (1 + m0 t)
        self.assertAlmostEqual(m_flow_uncorrected_denominator(1, 1, 1), 1 / 3, places=12)
        self.assertAlmostEqual(m_flow_uncorrected_denominator(1, 1, 1 - 1e-7), 1 / 3, places=6)
        self.assertGreater(abs(m_flow_uncorrected_denominator(1, 1, 1) - m_flow(1, 1, 1)), 0.1)
        np.testing.assert_allclose(m_flow_uncorrected_denominator(1.0, 2.0, np.array([0.5, 1.0])),
                                   [2 * 0.5 * np.exp(0.5) / (0.5 - 1.0 + 2 * np.exp(0.5)), 2 / 5])
        self.assertGreater(abs(m_flow_uncorrected_denominator(1, 1, 0) - m_flow(1, 1, 0)), 1.0)

    def test_semigroup(self):
        for b in [0.0, 0.25, 0.6, 1.0]:
            for m0 in [0.2, 1.0, 3.0]:
                self.assertAlmostEqual(m_flow(0.7, m_flow(0.4, m0, b), b), m_flow(1.1, m0, b), places=12)

    def test_monotone_in_b(self):
        values = m_flow(1.0, 1.5, np.linspace(0.0, 1.0, 21))
        self.assertTrue(np.all(np.diff(values) < 0))

    def test_numeric(self):
        for b in [0.0, 0.3, 1.0]:
            self.assertAlmostEqual(m_flow_numeric(1.0, 0.8, b), m_flow(1.0, 0.8, b), places=9)
        (m, running) = integrate_norm(1.0, 1.0, 1.0, f_C=lambda m: 2.0, running=lambda m, b: 1.0)
        self.assertAlmostEqual(m, 1 / 3, places=9)
        self.assertAlmostEqual(running, 1.0, places=12)
        # Running reward m along m' = -m^2 integrates to log(1 + t)
        (_, running) = integrate_norm(1.0, 1.0, 1.0, running=lambda m, b: m)
        self.assertAlmostEqual(running, np.log(2), places=9)

    def test_closed_form_lattice(self):
        times = np.linspace(0.1, 1.0, 10)
        norms = np.linspace(0.2, 2.0, 10)
        for b in np.linspace(0.0, 1.0, 11):
            for m0 in norms:
                expected = m_flow(times, m0, b)
                for (t, m) in zip(times, expected):
                    self.assertAlmostEqual(m_flow_numeric(t, m0, b, dt=2e-3), m, delta=1e-8)

    def test_invalid(self):
        with self.assertRaises(FragCoagInputException):
            m_flow(1, 1, 1.5)
        with self.assertRaises(FragCoagInputException):
            m_flow(-1, 1, 0.5)
        with self.assertRaises(FragCoagInputException):
            m_flow(1, -1, 0.5)
        with self.assertRaises(FragCoagInputException):
            integrate_norm(1.0, 1.0, -0.1)


class TestBstar(unittest.TestCase):
    def test_band(self):
        (lower, upper) = band(1.0, 0.5)
        self.assertAlmostEqual(lower, 0.5 / np.e)
        self.assertAlmostEqual(upper, 1.0)
        self.assertEqual(band(1.0, 2.0)[1], np.inf)
        self.assertEqual(band(0.0, 2.0), (2.0, 2.0))

    def test_bstar(self):
        for m_star in [0.3, 1.0, 4.0]:
            self.assertAlmostEqual(bstar(1.0, m_star, m_star), 1 / (1 + m_star), places=10)
        self.assertEqual(bstar(1.0, 1.0, 0.5), 1.0)
        self.assertEqual(bstar(1.0, 1.0, np.e), 0.0)

        b = bstar(2.0, 0.5, 0.9)
        self.assertAlmostEqual(m_flow(2.0, 0.5, b), 0.9, places=10)

    def test_branches(self):
        with self.assertRaises(BranchError) as cm:
            bstar(1.0, 1.0, 10.0)
        self.assertEqual(cm.exception.branch, GROW)
        with self.assertRaises(BranchError) as cm:
            bstar(1.0, 2.0, 0.5)
        self.assertEqual(cm.exception.branch, SHRINK)
        with self.assertRaises(FragCoagInputException):
            bstar(1.0, 1.0, 0.0)

        self.assertEqual(optimal_branch(1.0, 1.0, 10.0), (GROW, 0.0))
        self.assertEqual(optimal_branch(2.0, 1.0, 0.5), (SHRINK, 1.0))
        (branch, b) = optimal_branch(1.0, 1.0, 1.0)
        self.assertEqual(branch, REACH)
        self.assertAlmostEqual(b, 0.5, places=10)
        with self.assertRaises(FragCoagInputException):
            optimal_branch(1.0, 1.0, 1.0, t=2.0)

    def test_branch_agrees_with_band(self):
        (lower, upper) = band(1.0, 1.5)
        for m0 in np.linspace(0.05, 3.0, 30):
            (branch, _) = optimal_branch(m0, 1.0, 1.5)
            if m0 < lower - 1e-9:
                self.assertEqual(branch, GROW)
            elif m0 > upper + 1e-9:
                self.assertEqual(branch, SHRINK)
            elif lower + 1e-9 < m0 < upper - 1e-9:
                self.assertEqual(branch, REACH)


class TestValueFunction(unittest.TestCase):
    def test_terminal_spec(self):
        spec = TerminalSpec.quadratic(1.0)
        self.assertEqual(spec(1.0), 0.0)
        self.assertEqual(spec.to_json(), {'V0': '-(m - 1.0)**2', 'm_star': 1.0})
        self.assertEqual(TerminalSpec.from_expression("-(m - 2)**2", 2).m_star, 2.0)
        with self.assertRaises(FragCoagInputException):
            TerminalSpec(0.0, lambda m: -m ** 2)
        with self.assertRaises(FragCoagInputException):
            TerminalSpec(1.0, lambda m: -(m - 2) ** 2)
        with self.assertRaises(FragCoagInputException):
            TerminalSpec(1.0, lambda m: -abs(m - 1))
        with self.assertRaises(NotImplementedError):
            TerminalSpec(1.0, lambda m: -(m - 1) ** 2).to_json()
        TerminalSpec(1.0, lambda m: -abs(m - 1), check=False)

    def test_closed_form(self):
        spec = TerminalSpec.quadratic(10.0)
        self.assertAlmostEqual(value_closed_form(0.0, 1.0, 1.0, spec), -(np.e - 10) ** 2, places=10)
        self.assertEqual(value_closed_form(0.0, 5.0, 1.0, spec), 0.0)

        spec = TerminalSpec.quadratic(0.5)
        self.assertAlmostEqual(value_closed_form(0.0, 2.0, 1.0, spec), -(2 / 3 - 0.5) ** 2, places=12)
        self.assertEqual(value_closed_form(0.0, 0.8, 1.0, spec), 0.0)
        # At the horizon the value is the terminal reward
        self.assertAlmostEqual(value_closed_form(1.0, 2.0, 1.0, spec), -(1.5) ** 2)
        with self.assertRaises(FragCoagInputException):
            value_closed_form(2.0, 1.0, 1.0, spec)
        with self.assertRaises(FragCoagInputException):
            value_closed_form(0.0, -1.0, 1.0, spec)

    def test_optimal_action(self):
        spec = TerminalSpec.quadratic(1.0)
        alpha = optimal_action(1.0, 1.0, spec)
        self.assertAlmostEqual(alpha.at(0.3), 0.5, places=10)
        self.assertEqual(alpha.T, 1.0)
        self.assertEqual(optimal_action(1.0, 1.0, spec, t=0.5).T, 0.5)

        # Following the optimal constant action attains the closed-form value
        for (m0, m_star) in [(1.0, 10.0), (2.0, 0.5), (0.9, 1.2)]:
            spec = TerminalSpec.quadratic(m_star)
            b = optimal_action(m0, 1.0, spec).at(0.0)
            self.assertAlmostEqual(spec(m_flow(1.0, m0, b)), value_closed_form(0.0, m0, 1.0, spec), places=8)
        with self.assertRaises(FragCoagInputException):
            optimal_action(0.0, 1.0, spec)


class TestGridHJB(unittest.TestCase):
    def test_reach_branch(self):
        spec = TerminalSpec.quadratic(1.0)
        result = grid_dp_generalized(None, None, spec, None, 1.0, M_GRID, B_GRID)
        self.assertLess(abs(result.value_at(0.0, 1.0) - value_closed_form(0.0, 1.0, 1.0, spec)), 2e-3)
        self.assertAlmostEqual(result.value_at(1.0, 2.0), spec(2.0))

    def test_grow_branch(self):
        spec = TerminalSpec.quadratic(10.0)
        result = GridHJBSolver().solve(spec, 1.0, M_GRID, B_GRID)
        exact = value_closed_form(0.0, 1.0, 1.0, spec)
        self.assertLess(abs(result.value_at(0.0, 1.0) - exact), 1e-2 * abs(exact))
        self.assertEqual(result.action_at(0.0, 1.0), 0.0)

    def test_running_reward(self):
        solver = GridHJBSolver(running=lambda m, b: 1.0)
        result = solver.solve(lambda m: 0.0, 2.0, M_GRID, B_GRID)
        np.testing.assert_allclose(result.values[0], 2.0)
        self.assertEqual(result.times[-1], 2.0)

    def test_general_intensities(self):
        # Faster merging: the reachable band for m* = 1 still contains m0 = 1
        solver = GridHJBSolver(f_C=lambda m: 2.0, f_B=lambda m: 1.0 + 0.0 * m)
        spec = TerminalSpec.quadratic(1.0)
        result = solver.solve(spec, 1.0, M_GRID, B_GRID)
        self.assertLess(abs(result.value_at(0.0, 1.0)), 2e-3)
        # Equilibrium of -2 b m^2 + (1 - b) m at m = 1 is b = 1/3
        self.assertAlmostEqual(m_flow_numeric(1.0, 1.0, 1 / 3, f_C=lambda m: 2.0), 1.0, places=9)
        # Far below the band the solver still grows as fast as it can
        self.assertEqual(result.action_at(0.0, 0.05), 0.0)

    def test_cfl(self):
        solver = GridHJBSolver()
        bound = solver.stable_dt(M_GRID, B_GRID)
        self.assertAlmostEqual(bound, 0.01 / 3.99 ** 2, places=12)
        with self.assertRaises(CFLError) as cm:
            solver.solve(lambda m: 0.0, 1.0, M_GRID, B_GRID, dt=0.1)
        self.assertAlmostEqual(cm.exception.required_dt, bound)
        result = solver.solve(lambda m: 0.0, 1.0, M_GRID, B_GRID, dt=bound)
        self.assertEqual(len(result.times), int(np.ceil(1.0 / bound - 1e-9)) + 1)

    def test_invalid_grid(self):
        solver = GridHJBSolver()
        with self.assertRaises(FragCoagInputException):
            solver.solve(lambda m: 0.0, 1.0, [0.0], B_GRID)
        with self.assertRaises(FragCoagInputException):
            solver.solve(lambda m: 0.0, 1.0, [0.0, 0.5, 0.4], B_GRID)
        with self.assertRaises(FragCoagInputException):
            solver.solve(lambda m: 0.0, 1.0, M_GRID, [])
        with self.assertRaises(FragCoagInputException):
            solver.solve(lambda m: 0.0, 0.0, M_GRID, B_GRID)
        with self.assertRaises(FragCoagInputException):
            GridHJBSolver(f_C=lambda m: -1.0).solve(lambda m: 0.0, 1.0, M_GRID, B_GRID)

    def test_frame(self):
        m_grid = np.linspace(0.0, 2.0, 21)
        result = GridHJBSolver().solve(lambda m: -m, 0.5, m_grid, [0.0, 1.0])
        frame = result.to_frame(every=len(result.times) - 1)
        self.assertIsInstance(frame, pd.DataFrame)
        self.assertEqual(list(frame.columns), ['t', 'm', 'value', 'b'])
        self.assertEqual(len(frame), 2 * 21)
        # Minimizing m: always merge
        self.assertTrue(np.all(result.actions[:, 1:] == 1.0))


def run_tests():
    l = unittest.TestLoader()
    runner = unittest.TextTestRunner()
    print("\n\nTesting Norm-Reduced Problem")
    result = True
    for case in (TestNormFlow, TestBstar, TestValueFunction, TestGridHJB):
        result = runner.run(l.loadTestsFromTestCase(case)).wasSuccessful() and result

    if not result:
        raise Exception("Failed test")

if __name__ == '__main__':
    run_tests()
