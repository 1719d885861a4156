import json
import os
import tempfile
import unittest
import warnings

import numpy as np
import pandas as pd

from fragcoag.exceptions import ConfigError
from fragcoag.experiments import (KINDS, BoundsTable, ExperimentSpec, run_experiment, run_trajectory_convergence, run_value_convergence,
                                  runner_for)
from fragcoag.reduced1d import GROW, REACH, SHRINK, TerminalSpec, value_closed_form

REWARD = {'B': '0.2 * b * m', 'V0': '-(m - 0.6)**2'}


class TestExperimentSpec(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ConfigError):
            ExperimentSpec('no-such-kind')
        with self.assertRaises(ConfigError):
            ExperimentSpec('bounds', scaling_check='sometimes')
        with self.assertRaises(ConfigError):
            ExperimentSpec('bounds', sequence=[{'h': 0.1}])
        with self.assertRaises(ConfigError):
            ExperimentSpec.from_json({'kind': 'bounds', 'colour': 'red'})
        with self.assertRaises(ConfigError):
            ExperimentSpec.from_json({'kind': 'bounds', 'seed': 'abc'})
        with self.assertRaises(ConfigError):
            ExperimentSpec.from_json([1, 2])
        self.assertEqual(len(KINDS), 9)

    def test_hash(self):
        a = ExperimentSpec('example1d', options={'m_star': 2.0}, output='a.csv')
        b = ExperimentSpec('example1d', options={'m_star': 2.0}, output='b.csv')
        c = ExperimentSpec('example1d', options={'m_star': 3.0})
        self.assertEqual(a.hash, b.hash)
        self.assertNotEqual(a.hash, c.hash)
        self.assertEqual(ExperimentSpec.from_json(a.to_json()), a)

    def test_load_with_files(self):
        with tempfile.TemporaryDirectory() as directory:
            with open(os.path.join(directory, 'kernel.json'), 'w') as f:
                json.dump({'type': 'norm_dependent', 'f_C': '2', 'f_B': '1', 'bounds': {'C': 2, 'F': 1}}, f)
            with open(os.path.join(directory, 'spec.json'), 'w') as f:
                json.dump({'kind': 'bounds', 'kernel': 'kernel.json', 'sequence': [{'N': 2, 'h': 0.125}], 'output': 'out.csv'}, f)
            spec = ExperimentSpec.load(os.path.join(directory, 'spec.json'))
            self.assertEqual(spec.kernel['f_C'], '2')
            self.assertEqual(spec.output, os.path.join(directory, 'out.csv'))

            with open(os.path.join(directory, 'broken.json'), 'w') as f:
                json.dump({'kind': 'bounds', 'kernel': 'missing.json'}, f)
            with self.assertRaises(ConfigError):
                ExperimentSpec.load(os.path.join(directory, 'broken.json'))


class TestRunners(unittest.TestCase):
    def test_runner_for(self):
        self.assertIsInstance(runner_for('bounds'), BoundsTable)
        with self.assertRaises(ConfigError):
            runner_for('unknown')
        with self.assertRaises(ConfigError):
            BoundsTable().run(ExperimentSpec('example1d'))

    def test_budgets(self):
        with self.assertRaises(ConfigError):
            runner_for('event-count').run(ExperimentSpec('event-count', options={'replicas': 20000}))
        with self.assertRaises(ConfigError):
            runner_for('bounds').run(ExperimentSpec('bounds', sequence=[{'N': 1000}]))
        result = runner_for('bounds', max_N=2000).run(ExperimentSpec('bounds', sequence=[{'N': 1000}]))
        self.assertEqual(len(result.table), 1)

    def test_example1d(self):
        spec = ExperimentSpec('example1d', options={'m_star': 0.5, 'm0_values': [0.1, 0.5, 2.0]})
        table = run_experiment(spec).table
        self.assertEqual(list(table['branch']), [GROW, REACH, SHRINK])
        self.assertEqual(list(table['b'])[0], 0.0)
        self.assertEqual(list(table['b'])[2], 1.0)
        terminal = TerminalSpec.quadratic(0.5)
        for (m0, value) in zip(table['m0'], table['value_closed_form']):
            self.assertAlmostEqual(value, value_closed_form(0.0, m0, 1.0, terminal))
        self.assertTrue(table['value_grid'].isna().all())

    def test_example1d_grid(self):
        spec = ExperimentSpec('example1d', options={'m_star': 1.0, 'm0_values': [1.0], 'grid': True, 'm_points': 200, 'b_points': 16})
        table = run_experiment(spec).table
        self.assertLess(abs(table['value_grid'][0] - table['value_closed_form'][0]), 5e-3)

    def test_bounds(self):
        spec = ExperimentSpec('bounds', sequence=[{'N': 2, 'h': 1 / 8, 'tau': 1 / 8}, {'N': 4, 'h': 1 / 64, 'tau': 1 / 64},
                                                  {'N': 8, 'h': 1 / 512, 'tau': 1 / 512}])
        result = run_experiment(spec)
        self.assertEqual(len(result.table), 3)
        self.assertTrue(result.table['passed'].all())
        self.assertTrue((result.table['ledger_K'] == 9.0).all())
        self.assertEqual(result.summary['monotone'], {'I0': True, 'I1': True, 'I2': True, 'J': True})
        self.assertEqual(result.notes, [])

    def test_scaling_check(self):
        sequence = [{'N': 10, 'tau': 0.1}, {'N': 20, 'tau': 0.05}]
        options = {'T': 0.5, 'replicas': 20, 'points': 11, 'dt': 1e-2}
        with self.assertRaises(ConfigError):
            run_experiment(ExperimentSpec('trajectory-convergence', sequence=sequence, options=options, scaling_check='strict'))

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            result = run_experiment(ExperimentSpec('trajectory-convergence', sequence=sequence, options=options, seed=4))
        self.assertTrue(any('Scaling sequence fails' in str(w.message) for w in caught))
        self.assertEqual(len(result.notes), 1)
        self.assertFalse(result.scaling[1]['passed'])

        table = result.table
        self.assertEqual(list(table['N']), [10, 20])
        self.assertTrue((table['mean_sup_deviation'] >= 0).all())
        self.assertTrue(table['prob_exceed'].between(0, 1).all())
        self.assertIn('ledger_I0', table.columns)

        # Same seed, same table
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            again = run_trajectory_convergence(ExperimentSpec('trajectory-convergence', sequence=sequence, options=options, seed=4))
        pd.testing.assert_frame_equal(again, table)

    def test_dp_compare(self):
        spec = ExperimentSpec('dp-compare', reward=REWARD, options={'replicas': 50})
        table = run_experiment(spec).table
        self.assertEqual(len(table), 3 + 2 * 9)
        value = table.loc[table['kind'] == 'dp', 'value'].iloc[0]
        self.assertAlmostEqual(value, table.loc[table['kind'] == 'exhaustive', 'value'].iloc[0], places=9)
        self.assertTrue((table.loc[table['kind'] == 'openloop', 'value'] <= value + 1e-12).all())
        with self.assertRaises(ConfigError):
            run_experiment(ExperimentSpec('dp-compare'))

    def test_value_convergence(self):
        spec = ExperimentSpec('value-convergence', reward={'B': '0', 'V0': '-(m - 0.8)**2'}, sequence=[{'N': 4, 'tau': 0.5}],
                              options={'m_star': 0.8, 'replicas': 50, 'dt': 1e-2, 'E_grid': [0.0, 1.0]})
        result = run_experiment(spec)
        row = result.table.iloc[0]
        self.assertEqual(row['n'], 2)
        self.assertAlmostEqual(row['closed_form'], 0.0)
        self.assertFalse(np.isnan(row['dp_value']))
        self.assertLessEqual(row['value_mc'], 1e-12)
        pd.testing.assert_frame_equal(run_value_convergence(spec), result.table)

        with self.assertRaises(ConfigError):
            run_experiment(ExperimentSpec('value-convergence', reward=REWARD, sequence=[{'N': 4}]))

    def test_event_count(self):
        spec = ExperimentSpec('event-count', seed=2, options={'N': 20, 'windows': 4, 'replicas': 50, 'tau': 0.05})
        row = run_experiment(spec).table.iloc[0]
        self.assertTrue(row['mean_within_envelope'])
        self.assertTrue(row['second_within_envelope'])
        self.assertEqual(row['N'], 20)

    def test_output(self):
        spec = ExperimentSpec('event-count', seed=7, options={'N': 10, 'windows': 2, 'replicas': 20, 'tau': 0.05})
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'nested', 'events.csv')
            run_experiment(spec, path)
            with open(path, 'rb') as f:
                first = f.read()
            with open(os.path.join(directory, 'nested', 'events.json')) as f:
                sidecar = json.load(f)
            run_experiment(spec, path)
            with open(path, 'rb') as f:
                self.assertEqual(f.read(), first)
        self.assertEqual(sidecar['spec_sha256'], spec.hash)
        self.assertEqual(sidecar['master_seed'], 7)
        self.assertEqual(sidecar['kind'], 'event-count')
        self.assertEqual(sidecar['config']['options']['N'], 10)


class TestConvergence(unittest.TestCase):
    """Desk-scale runs of the convergence experiments"""
    SIZES = [25, 50, 100, 200]

    def test_trajectory_convergence(self):
        sequence = [{'N': N, 'tau': 0.1} for N in self.SIZES]
        spec = ExperimentSpec('trajectory-convergence', sequence=sequence, seed=12, scaling_check='off',
                              options={'b': 0.5, 'replicas': 200})
        deviation = list(run_experiment(spec).table['mean_sup_deviation'])
        self.assertTrue(all(a > b for (a, b) in zip(deviation, deviation[1:])))
        self.assertLess(deviation[-1], 0.5 * deviation[0])

    def test_value_gap(self):
        sequence = [{'N': N, 'tau': 0.1} for N in self.SIZES]
        spec = ExperimentSpec('value-convergence', reward={'B': '0', 'V0': '-(m - 1)**2'}, sequence=sequence, seed=13,
                              scaling_check='off', options={'m_star': 1.0, 'replicas': 400})
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            table = run_experiment(spec).table
        last = table.iloc[-1]
        self.assertEqual(last['N'], 200)
        self.assertLess(last['gap_mc'], 0.05)
        for (_, row) in table.iterrows():
            self.assertLessEqual(row['gap_mc'], 3 * row['value_mc_se'] + 0.01)
            # The norm-reduced optimum misses the limit: singletons do not split
            self.assertAlmostEqual(row['closed_form'], 0.0)
            self.assertGreater(abs(row['limit_value'] - row['closed_form']), 0.05)

    def test_value_gap_small_populations(self):
        sequence = [{'N': N, 'tau': 0.5} for N in [3, 6, 9]]
        spec = ExperimentSpec('value-convergence', reward={'B': '0', 'V0': '-(m - 1)**2'}, sequence=sequence, seed=14,
                              scaling_check='off', options={'m_star': 1.0, 'replicas': 400})
        table = run_experiment(spec).table
        for (_, row) in table.iterrows():
            self.assertFalse(np.isnan(row['dp_value']))
            self.assertAlmostEqual(row['gap_dp'], abs(row['dp_value'] - row['limit_value']))
            # The DP optimum dominates the limit-built policy
            self.assertGreaterEqual(row['dp_value'], row['value_mc'] - 3 * row['value_mc_se'])

    def test_drift(self):
        spec = ExperimentSpec('drift-check', seed=15, options={'N': 50, 'pairs': 20, 'replicas': 1000})
        table = run_experiment(spec).table
        self.assertEqual(len(table), 20)
        self.assertTrue(table['passed'].all())
        self.assertTrue((table['deviation'] <= table['I0'] + 3 * table['se']).all())


def run_tests():
    l = unittest.TestLoader()
    runner = unittest.TextTestRunner()
    print("\n\nTesting Experiments")
    result = True
    for case in (TestExperimentSpec, TestRunners, TestConvergence):
        result = runner.run(l.loadTestsFromTestCase(case)).wasSuccessful() and result

    if not result:
        raise Exception("Failed test")

if __name__ == '__main__':
    run_tests()
