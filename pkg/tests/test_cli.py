from contextlib import redirect_stderr, redirect_stdout
import io
import json
import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from fragcoag.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main, parse_grid
from fragcoag.exceptions import FragCoagInputException


def run(argv):
    out = io.StringIO()
    err = io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return (code, out.getvalue(), err.getvalue())


class TestCli(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.reward = os.path.join(self.directory.name, 'reward.json')
        with open(self.reward, 'w') as f:
            json.dump({'B': '0.2 * b * m', 'V0': '-(m - 0.6)**2'}, f)

    def tearDown(self):
        self.directory.cleanup()

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def test_parse_grid(self):
        np.testing.assert_allclose(parse_grid('0:1:0.5'), [0, 0.5, 1])
        np.testing.assert_allclose(parse_grid('0:1:0.1'), np.linspace(0, 1, 11))
        np.testing.assert_allclose(parse_grid('0,0.25'), [0, 0.25])
        with self.assertRaises(FragCoagInputException):
            parse_grid('a:b')

    def test_example1d_solve(self):
        (code, out, _) = run(['example1d', 'solve', '--V0=-(m - 1)**2', '--mstar', '1', '--m0', '1'])
        self.assertEqual(code, EXIT_OK)
        data = json.loads(out)
        self.assertEqual(data['branch'], 'reach')
        self.assertAlmostEqual(data['b'], 0.5, places=9)
        self.assertEqual(data['value'], 0.0)

        # V0 not maximized at m*
        (code, _, err) = run(['example1d', 'solve', '--V0=-(m - 2)**2', '--mstar', '1', '--m0', '1'])
        self.assertEqual(code, EXIT_CONFIG)
        self.assertIn('error', err)

    def test_example1d_grid(self):
        (code, _, err) = run(['example1d', 'grid', '--V0=-(m - 1)**2', '--mstar', '1', '--dt', '1'])
        self.assertEqual(code, EXIT_NUMERICAL)
        self.assertIn('stability bound', err)

        output = self.path('grid.csv')
        (code, _, _) = run(['example1d', 'grid', '--V0=-(m - 1)**2', '--mstar', '1', '--m-points', '50', '--b-points', '5',
                            '--every', '1000000', '--output', output])
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(output)
        self.assertEqual(list(table.columns), ['t', 'm', 'value', 'b'])
        self.assertEqual(len(table), 50)

    def test_dp(self):
        (code, out, _) = run(['dp', '--N', '3', '--tau', '0.5', '--n', '2', '--reward', self.reward])
        self.assertEqual(code, EXIT_OK)
        self.assertIsInstance(json.loads(out), dict)

        (code, _, _) = run(['dp', '--N', '3', '--tau', '0.5', '--n', '2', '--reward', self.reward, '--Egrid', 'a:b'])
        self.assertEqual(code, EXIT_CONFIG)
        (code, _, _) = run(['dp', '--N', '3', '--tau', '0.5', '--n', '2', '--reward', self.path('missing.json')])
        self.assertEqual(code, EXIT_CONFIG)

    def test_simulate(self):
        output = self.path('sim.csv')
        (code, _, _) = run(['simulate', '--N', '10', '--T', '0.5', '--tau', '0.1', '--replicas', '2', '--seed', '3', '--output', output])
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(output)
        self.assertEqual(list(table.columns), ['replica', 't', 'm', 'coalitions', 'size', 'count'])
        self.assertEqual(set(table['replica']), {0, 1})
        # Mass is conserved: sum of size * count * h is 1 at every time
        mass = (table['size'] * table['count'] * 0.1).groupby([table['replica'], table['t']]).sum()
        np.testing.assert_allclose(mass, 1.0)

    def test_meanfield(self):
        output = self.path('mf.csv')
        (code, _, _) = run(['meanfield', '--T', '0.2', '--dt', '0.01', '--K-max', '8', '--b', '0.3', '--output', output])
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(output)
        np.testing.assert_allclose(table['mass'], 1.0, atol=1e-6)

        (code, _, _) = run(['meanfield', '--T', '1', '--dt', '1', '--m0', '10', '--K-max', '1', '--b', '1'])
        self.assertEqual(code, EXIT_NUMERICAL)

    def test_value(self):
        (code, out, _) = run(['value', '--N', '4', '--reward', self.reward, '--tau', '0.5', '--n', '2', '--replicas', '20'])
        self.assertEqual(code, EXIT_OK)
        data = json.loads(out)
        self.assertEqual(data['replicas'], 20)
        self.assertGreaterEqual(data['se'], 0)

        (code, _, _) = run(['value', '--N', '4', '--reward', self.reward, '--replicas', '20'])
        self.assertEqual(code, EXIT_CONFIG)

    def test_bounds(self):
        output = self.path('bounds.csv')
        (code, _, _) = run(['bounds', '--levels', '3', '--output', output])
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(output)
        self.assertEqual(list(table['N']), [2, 4, 8])
        self.assertTrue(table['passed'].all())

    def test_experiment(self):
        spec = self.path('spec.json')
        with open(spec, 'w') as f:
            json.dump({'kind': 'example1d', 'options': {'m_star': 0.5, 'm0_values': [0.1, 2.0]}, 'output': 'out.csv'}, f)
        (code, _, _) = run(['experiment', 'run', spec])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(list(pd.read_csv(self.path('out.csv'))['branch']), ['grow', 'shrink'])
        self.assertTrue(os.path.exists(self.path('out.json')))

        (code, _, _) = run(['experiment', 'run', self.path('nothing.json')])
        self.assertEqual(code, EXIT_CONFIG)


def run_tests():
    l = unittest.TestLoader()
    runner = unittest.TextTestRunner()
    print("\n\nTesting Command Line")
    result = runner.run(l.loadTestsFromTestCase(TestCli)).wasSuccessful()

    if not result:
        raise Exception("Failed test")

if __name__ == '__main__':
    run_tests()
