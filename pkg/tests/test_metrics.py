import unittest
import warnings

import numpy as np

from fragcoag.exceptions import FragCoagInputException
from fragcoag.metrics import calc_metrics, is_decreasing, sup_deviation


class TestMetrics(unittest.TestCase):
    def test_calc_metrics(self):
        metrics = calc_metrics(range(10))
        self.assertAlmostEqual(metrics['min'], 0)
        self.assertAlmostEqual(metrics['max'], 9)
        self.assertAlmostEqual(metrics['mean'], 4.5)
        self.assertAlmostEqual(metrics['median'], 4.5)
        self.assertAlmostEqual(metrics['mean absolute deviation'], 2.5)
        self.assertAlmostEqual(metrics['std'], 3.0276503540974917)
        self.assertAlmostEqual(metrics['standard error'], 3.0276503540974917 / np.sqrt(10))
        self.assertEqual(metrics['number of samples'], 10)
        self.assertAlmostEqual(metrics['percentiles']['10'], 0.9)
        self.assertAlmostEqual(metrics['percentiles']['25'], 2.25)
        # Not enough samples for these
        self.assertIsNone(metrics['percentiles']['1'])
        self.assertIsNone(metrics['percentiles']['99'])
        self.assertNotIn('bias', metrics)

    def test_threshold(self):
        metrics = calc_metrics([0.05, 0.2, 0.01, 0.3], threshold=0.1)
        self.assertAlmostEqual(metrics['fraction above threshold'], 0.5)

    def test_ground_truth(self):
        metrics = calc_metrics([1.0, 2.0, 3.0], ground_truth=1.5)
        self.assertAlmostEqual(metrics['bias'], 0.5)
        self.assertAlmostEqual(metrics['mean absolute error'], (0.5 + 0.5 + 1.5) / 3)
        self.assertAlmostEqual(metrics['standard errors from ground truth'], 0.5 / (1 / np.sqrt(3)))

        metrics = calc_metrics([2.0, 2.0], ground_truth=2.0)
        self.assertEqual(metrics['standard errors from ground truth'], 0.0)
        self.assertEqual(calc_metrics([2.0], ground_truth=1.0)['standard errors from ground truth'], np.inf)

    def test_missing_samples(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            metrics = calc_metrics([1.0, None, np.nan, 3.0])
        self.assertEqual(len(caught), 1)
        self.assertEqual(metrics['number of samples'], 2)
        self.assertAlmostEqual(metrics['mean'], 2.0)

        with self.assertRaises(FragCoagInputException):
            calc_metrics([])
        with self.assertRaises(FragCoagInputException):
            calc_metrics([None, np.nan])

    def test_sup_deviation(self):
        a = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        b = np.array([[0.0, 0.0], [0.0, 0.0], [0.3, 0.4]])
        self.assertAlmostEqual(sup_deviation(a, b), 1.0)
        self.assertAlmostEqual(sup_deviation(a[2:], b[2:]), 0.5)
        self.assertAlmostEqual(sup_deviation(a[2:], b[2:], 'l1'), 0.7)
        self.assertEqual(sup_deviation(np.zeros((0, 2)), np.zeros((0, 2))), 0.0)
        with self.assertRaises(FragCoagInputException):
            sup_deviation(a, b[:2])
        with self.assertRaises(FragCoagInputException):
            sup_deviation(a, b, 'sup')

    def test_is_decreasing(self):
        self.assertTrue(is_decreasing([3, 2, 1]))
        self.assertFalse(is_decreasing([3, 3, 1]))
        self.assertTrue(is_decreasing([3, 3, 1], strict=False))
        self.assertTrue(is_decreasing([]))


def run_tests():
    l = unittest.TestLoader()
    runner = unittest.TextTestRunner()
    print("\n\nTesting Metrics")
    result = runner.run(l.loadTestsFromTestCase(TestMetrics)).wasSuccessful()

    if not result:
        raise Exception("Failed test")

if __name__ == '__main__':
    run_tests()
