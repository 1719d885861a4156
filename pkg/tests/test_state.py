import unittest

import numpy as np

from fragcoag.exceptions import ConfigError, FragCoagInputException, StateSpaceError, TruncationError
from fragcoag.state import Composition, MeanFieldState, StateSpace, enumerate_compositions, norms, partition_count, random_composition, to_mean_field


class TestState(unittest.TestCase):
    def test_composition(self):
        c = Composition({1: 2, 3: 1, 4: 0}, h=0.2)
        self.assertEqual(c.N, 5)
        self.assertEqual(c.coalition_count, 3)
        self.assertEqual(dict(c.counts), {1: 2, 3: 1})
        self.assertNotIn(4, c)
        self.assertEqual(c.get(4), 0)
        self.assertAlmostEqual(c.x_mass, 1.0)
        self.assertAlmostEqual(c.m, 0.6)
        self.assertEqual(c.max_size, 3)
        self.assertEqual(c.key(), ((1, 2), (3, 1)))

        # Equality and hashing depend on the counts and the scale
        self.assertEqual(c, Composition({3: 1, 1: 2}, h=0.2))
        self.assertNotEqual(c, Composition({3: 1, 1: 2}, h=0.1))
        self.assertEqual(len({c, Composition({1: 2, 3: 1}, h=0.2)}), 1)

    def test_composition_invalid(self):
        with self.assertRaises(FragCoagInputException):
            Composition({0: 1}, h=1)
        with self.assertRaises(FragCoagInputException):
            Composition({1: -1}, h=1)
        with self.assertRaises(FragCoagInputException):
            Composition({1: 1.5}, h=1)
        with self.assertRaises(FragCoagInputException):
            Composition({1: 1}, h=0)
        with self.assertRaises(StateSpaceError):
            Composition({1: 3}, h=0.5, R=1)
        # Mass exactly at the radius is allowed
        Composition({1: 2}, h=0.5, R=1)

    def test_singletons(self):
        c = Composition.singletons(4, 0.25)
        self.assertEqual(dict(c), {1: 4})
        self.assertAlmostEqual(c.m, 1.0)
        self.assertEqual(Composition.singletons(0, 1.0).N, 0)

    def test_to_array(self):
        c = Composition({1: 2, 3: 1}, h=0.5)
        np.testing.assert_array_equal(c.to_array(4), [1.0, 0.0, 0.5, 0.0])
        with self.assertRaises(TruncationError):
            c.to_array(2)

        x = to_mean_field(c, 5)
        self.assertEqual(x.K_max, 5)
        self.assertAlmostEqual(x.m, 1.5)
        self.assertAlmostEqual(x.mass, 2.5)
        self.assertEqual(x[3], 0.5)
        self.assertEqual(x[9], 0.0)

    def test_json(self):
        c = Composition({1: 2, 3: 1}, h=0.5)
        data = c.to_json()
        self.assertEqual(data, {'h': 0.5, 'counts': {'1': 2, '3': 1}})
        self.assertEqual(Composition.from_json(data), c)
        with self.assertRaises(ConfigError):
            Composition.from_json({'counts': {'1': 1}})

        x = MeanFieldState([0.5, 0.25])
        self.assertEqual(MeanFieldState.from_json(x.to_json()), x)
        with self.assertRaises(ConfigError):
            MeanFieldState.from_json({'x': [1]})

    def test_mean_field_state(self):
        with self.assertRaises(FragCoagInputException):
            MeanFieldState([0.1, -0.1])
        with self.assertRaises(FragCoagInputException):
            MeanFieldState([])
        with self.assertRaises(StateSpaceError):
            MeanFieldState([0.5, 0.5], R=1)
        x = MeanFieldState([0.5, 0.25], R=1)
        with self.assertRaises(ValueError):
            x.x[0] = 1.0

        y = x.padded(4)
        self.assertEqual(y.K_max, 4)
        self.assertEqual(y.mass, x.mass)
        with self.assertRaises(FragCoagInputException):
            x.padded(1)
        with self.assertRaises(IndexError):
            x[0]

    def test_norms(self):
        c = Composition({1: 2, 3: 1}, h=0.5)
        report = norms(c)
        self.assertAlmostEqual(report.l1, 1.5)
        self.assertAlmostEqual(report.l1L, 2.5)
        self.assertAlmostEqual(report.l2, 0.5 * np.sqrt(5))

        # Same norms on the rescaled array
        dense = norms(c.to_array(3))
        self.assertAlmostEqual(dense.l1, report.l1)
        self.assertAlmostEqual(dense.l1L, report.l1L)
        self.assertAlmostEqual(dense.l2, report.l2)

        # l2 <= l1 <= l1L on nonnegative states
        rng = np.random.default_rng(3)
        for _ in range(20):
            r = norms(MeanFieldState(rng.exponential(size=6)))
            self.assertLessEqual(r.l2, r.l1 + 1e-12)
            self.assertLessEqual(r.l1, r.l1L + 1e-12)

    def test_partitions(self):
        self.assertEqual([partition_count(n) for n in range(8)], [1, 1, 2, 3, 5, 7, 11, 15])
        states = enumerate_compositions(4, 0.25)
        self.assertEqual(len(states), 5)
        self.assertTrue(all(c.N == 4 for c in states))
        self.assertEqual(len(set(states)), 5)
        with self.assertRaises(StateSpaceError):
            enumerate_compositions(30, 1.0, cap=100)

    def test_state_space(self):
        space = StateSpace(3)
        self.assertEqual(len(space), 3)
        self.assertAlmostEqual(space.h, 1 / 3)
        for (i, c) in enumerate(space):
            self.assertEqual(space.index(c), i)
            self.assertIs(space[i], c)
        self.assertEqual(space.index({3: 1}), space.index(Composition({3: 1}, 1 / 3)))
        with self.assertRaises(StateSpaceError):
            space.index({1: 4})

    def test_random_composition(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            c = random_composition(7, 0.1, rng)
            self.assertEqual(c.N, 7)
        self.assertEqual(random_composition(0, 0.1, rng).N, 0)


def run_tests():
    l = unittest.TestLoader()
    runner = unittest.TextTestRunner()
    print("\n\nTesting States")
    result = runner.run(l.loadTestsFromTestCase(TestState)).wasSuccessful()

    if not result:
        raise Exception("Failed test")

if __name__ == '__main__':
    run_tests()
