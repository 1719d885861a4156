import unittest

import numpy as np
from scipy import stats

from fragcoag.exceptions import AbsorbingStateError, FragCoagInputException, FragCoagTypeError
from fragcoag.kernels import KernelBounds, NormDependentKernel, constant_example_kernel
from fragcoag.simulators import (MERGE, CTMCSimulator, ConstantSchedule, RateSource, ReplicaSet, Trajectory, apply_event, chain_generator_apply,
                                 decision_count, drift_estimate, event_table, sample_event,
                                 event_count_experiment, event_rates, generator_matrix, simulate, step, total_rate, window_count)
from fragcoag.state import Composition, StateSpace, random_composition
from fragcoag.utils import mean_and_se, replica_rng, run_replicas


class TestCTMC(unittest.TestCase):
    def setUp(self):
        self.kernel = constant_example_kernel()

    def test_rates(self):
        c = Composition({1: 2}, h=1)
        self.assertEqual(total_rate(c, self.kernel, 1.0), 2.0)
        self.assertEqual(total_rate(c, self.kernel, 1.0, literal_generator=True), 4.0)
        self.assertEqual(event_rates(c, self.kernel, 1.0), {('merge', 1, 1): 2.0})

        c = Composition({1: 1, 2: 1}, h=0.5)
        rates = event_rates(c, self.kernel, 0.5)
        self.assertEqual(set(rates), {('merge', 1, 2), ('merge', 2, 1), ('split', 2, 1)})
        self.assertAlmostEqual(rates[('merge', 1, 2)], 0.25)
        self.assertAlmostEqual(rates[('split', 2, 1)], 0.5)
        self.assertAlmostEqual(total_rate(c, self.kernel, 0.5), 1.0)

        self.assertEqual(total_rate(Composition({}, h=1), self.kernel, 0.5), 0.0)

    def test_rates_random_states(self):
        # Constant kernel: merges total h b M(M-1) over M coalitions, splits total (1-b) per non-singleton
        rng = np.random.default_rng(11)
        for _ in range(1000):
            N = int(rng.integers(1, 40))
            c = random_composition(N, 1 / N, rng)
            b = float(rng.uniform())
            (M, singles) = (c.coalition_count, c.counts.get(1, 0))
            self.assertAlmostEqual(total_rate(c, self.kernel, b), b * M * (M - 1) / N + (1 - b) * (M - singles), places=9)
            self.assertAlmostEqual(total_rate(c, self.kernel, b, literal_generator=True), b * M * M / N + (1 - b) * (M - singles), places=9)
            for ((kind, i, j), rate) in event_rates(c, self.kernel, b).items():
                if kind == MERGE and i != j:
                    self.assertAlmostEqual(rate, b * c.counts[i] * c.counts[j] / N)

    def test_event_frequencies(self):
        c = Composition({1: 3, 2: 2, 4: 1}, h=1 / 11)
        table = event_table(dict(c.counts), c.h, RateSource(self.kernel), 0.4)
        rng = np.random.default_rng(5)
        draws = [sample_event(table, u) for u in rng.uniform(0.0, table.total, 1000000)]
        observed = np.bincount(draws, minlength=len(table.rates))
        enabled = table.rates > 0
        self.assertEqual(observed[~enabled].sum(), 0)
        expected = table.rates[enabled] / table.total * len(draws)
        self.assertGreater(stats.chisquare(observed[enabled], expected).pvalue, 1e-3)

    def test_mass_conserved_over_events(self):
        rng = np.random.default_rng(8)
        violations = 0
        for _ in range(4):
            (f_C, f_B) = rng.uniform(0.2, 3.0, size=2)
            kernel = NormDependentKernel(lambda m, a=f_C: a, lambda m, a=f_B: a, KernelBounds(C=f_C, F=f_B), state_dependent=False)
            source = RateSource(kernel)
            counts = dict(random_composition(12, 1 / 12, rng).counts)
            for b in rng.choice([0.2, 0.5, 0.8], size=250000):
                table = event_table(counts, 1 / 12, source, b)
                e = sample_event(table, rng.uniform(0.0, table.total))
                (kind, i, j) = table.key(e)
                apply_event(counts, kind, i, j)
                violations += sum(k * n for (k, n) in counts.items()) != 12
        self.assertEqual(violations, 0)

    def test_step(self):
        rng = np.random.default_rng(0)
        (wait, entry, after) = step(Composition({1: 2}, h=0.5), self.kernel, 1.0, rng)
        self.assertGreater(wait, 0)
        self.assertEqual(entry.key, ('merge', 1, 1))
        self.assertEqual(entry.coalitions_before, 2)
        self.assertEqual(dict(after), {2: 1})
        self.assertEqual(after.N, 2)

        with self.assertRaises(AbsorbingStateError):
            step(Composition({1: 1}, h=1), self.kernel, 1.0, rng)
        with self.assertRaises(AbsorbingStateError):
            step(Composition({1: 3}, h=1), self.kernel, 0.0, rng)

    def test_simulate(self):
        x0 = Composition.singletons(8, 1 / 8)
        traj = simulate(x0, self.kernel, 0.5, T=1.0, tau=0.25, seed=3)
        self.assertIsInstance(traj, Trajectory)
        np.testing.assert_allclose(traj.times, [0, 0.25, 0.5, 0.75, 1.0])
        self.assertEqual(len(traj.states), 5)
        self.assertEqual(traj.states[0], x0)
        self.assertEqual(len(traj.event_counts), 4)
        np.testing.assert_array_equal(traj.decisions, [0.5] * 4)
        for c in traj.states:
            self.assertEqual(c.N, 8)
            self.assertAlmostEqual(c.x_mass, 1.0)
        np.testing.assert_allclose(traj.mass(), 1.0)
        self.assertTrue(np.all(traj.m() <= 1.0 + 1e-12))

        # Same seed, same path
        self.assertEqual(traj, simulate(x0, self.kernel, 0.5, T=1.0, tau=0.25, seed=3))

    def test_absorbing_path(self):
        # Pure splitting from singletons: nothing can happen
        x0 = Composition.singletons(4, 0.25)
        traj = simulate(x0, self.kernel, 0.0, T=2.0, tau=0.5, seed=0)
        self.assertEqual(int(traj.event_counts.sum()), 0)
        self.assertTrue(all(c == x0 for c in traj.states))

        # Pure merging ends in the grand coalition
        traj = simulate(x0, self.kernel, 1.0, T=200.0, tau=200.0, seed=0)
        self.assertEqual(dict(traj.final_state), {4: 1})
        self.assertEqual(int(traj.event_counts.sum()), 3)

    def test_observation_times(self):
        sim = CTMCSimulator(self.kernel, record_events=True)
        x0 = Composition.singletons(6, 1 / 6)
        traj = sim.simulate(x0, 0.7, T=1.0, tau=0.5, times=[0.0, 0.1, 0.9, 1.0], rng=np.random.default_rng(5))
        self.assertEqual(len(traj.states), 4)
        self.assertEqual(len(traj.events), int(traj.event_counts.sum()))
        self.assertTrue(all(0 < e.time < 1.0 for e in traj.events))
        with self.assertRaises(FragCoagInputException):
            sim.simulate(x0, 0.7, T=1.0, times=[0.5, 0.2])
        with self.assertRaises(FragCoagInputException):
            sim.simulate(x0, 0.7, T=1.0, times=[0.0, 2.0])
        with self.assertRaises(FragCoagTypeError):
            sim.simulate(x0, 'half', T=1.0)
        with self.assertRaises(FragCoagTypeError):
            CTMCSimulator(None)

    def test_decision_grid(self):
        self.assertEqual(decision_count(1.0, 0.1), 10)
        self.assertEqual(decision_count(1.05, 0.1), 10)
        self.assertEqual(window_count(1.05, 0.1), 11)
        self.assertEqual(window_count(0, 0.1), 0)
        with self.assertRaises(FragCoagInputException):
            decision_count(1.0, 0.0)

        class Alternate(ConstantSchedule):
            def decide(self, k, state):
                return 0.0 if k % 2 else 1.0

        traj = simulate(Composition.singletons(4, 0.25), self.kernel, Alternate(1.0), T=1.0, tau=0.25, seed=0)
        np.testing.assert_array_equal(traj.decisions, [1.0, 0.0, 1.0, 0.0])

    def test_replicas(self):
        sim = CTMCSimulator(self.kernel)
        x0 = Composition.singletons(6, 1 / 6)
        serial = sim.simulate_replicas(x0, 0.5, T=1.0, tau=0.5, seed=7, replicas=6)
        threaded = sim.simulate_replicas(x0, 0.5, T=1.0, tau=0.5, seed=7, replicas=6, n_workers=3)
        self.assertIsInstance(serial, ReplicaSet)
        self.assertEqual(len(serial), 6)
        for (a, b) in zip(serial, threaded):
            self.assertEqual(a, b)
        self.assertEqual(serial[2].seed, (7, 2))
        self.assertEqual(len(serial.snapshot(0)), 6)
        self.assertEqual(serial.mean(6).shape, (3, 6))
        self.assertEqual(serial.final_m().shape, (6,))
        with self.assertRaises(ValueError):
            serial.append(serial[0])
        with self.assertRaises(ValueError):
            serial[0] = serial[1]

    def test_seeding(self):
        a = replica_rng(11, 4).uniform(size=3)
        np.testing.assert_array_equal(a, replica_rng(11, 4).uniform(size=3))
        self.assertFalse(np.array_equal(a, replica_rng(11, 5).uniform(size=3)))
        self.assertEqual(run_replicas(lambda r, rng: r * r, 0, 5, n_workers=2), [0, 1, 4, 9, 16])
        (mean, se) = mean_and_se([[1.0, 2.0], [3.0, 2.0]])
        np.testing.assert_allclose(mean, [2.0, 2.0])
        np.testing.assert_allclose(se, [1.0, 0.0])
        (_, se) = mean_and_se([[1.0]])
        np.testing.assert_array_equal(se, [0.0])
        samples = np.random.default_rng(4).normal(size=(50, 3))
        (_, se) = mean_and_se(samples)
        np.testing.assert_allclose(se, samples.std(axis=0, ddof=1) / np.sqrt(50))

    def test_affine_interpolation(self):
        states = [Composition({1: 2}, h=0.5), Composition({2: 1}, h=0.5)]
        traj = Trajectory([0.0, 1.0], states, [1], [1.0], tau=1.0)
        np.testing.assert_allclose(traj.affine_interpolation(2, [0.0, 0.25, 1.0]), [[1.0, 0.0], [0.75, 0.125], [0.0, 0.5]])
        self.assertEqual(traj.dense(2).shape, (2, 2))

    def test_drift(self):
        # From {1: 2} at b = 1 the only event is the merge, at rate h*n1*(n1-1) = 1
        x = Composition({1: 2}, h=0.5)
        (mean, se) = drift_estimate(x, self.kernel, 1.0, tau=1.0, replicas=2000, seed=1)
        expected = (1 - np.exp(-1.0)) * np.array([-1.0, 0.5])
        self.assertTrue(np.all(np.abs(mean - expected) <= 4 * se + 1e-12))

        (mean, se) = drift_estimate(x, self.kernel, 1.0, tau=0.0, replicas=2)
        np.testing.assert_array_equal(mean, [0.0, 0.0])
        with self.assertRaises(FragCoagInputException):
            drift_estimate(x, self.kernel, 1.0, tau=1.0, replicas=1)

    def test_generator_matrix(self):
        space = StateSpace(2, 0.5)
        Q = generator_matrix(space, self.kernel, 0.5)
        np.testing.assert_allclose(Q.sum(axis=1), 0.0, atol=1e-15)
        (pair, whole) = (space.index({1: 2}), space.index({2: 1}))
        self.assertAlmostEqual(Q[pair, whole], 0.5)
        self.assertAlmostEqual(Q[whole, pair], 0.5)

        space = StateSpace(4)
        for b in [0.0, 0.3, 1.0]:
            Q = generator_matrix(space, self.kernel, b)
            np.testing.assert_allclose(Q.sum(axis=1), 0.0, atol=1e-12)
            off = Q - np.diag(np.diag(Q))
            self.assertTrue(np.all(off >= 0))
            # Off-diagonal row sums agree with the simulator's total rate
            for (s, c) in enumerate(space):
                self.assertAlmostEqual(off[s].sum(), total_rate(c, self.kernel, b))

    def test_chain_generator(self):
        c = Composition({1: 2}, h=0.5)
        self.assertAlmostEqual(chain_generator_apply(lambda y: y.m, c, self.kernel, 1.0), -0.5)
        # Mass is conserved by every event
        c = Composition({1: 2, 3: 1}, h=0.2)
        self.assertAlmostEqual(chain_generator_apply(lambda y: y.x_mass, c, self.kernel, 0.4), 0.0)

    def test_event_counts(self):
        x0 = Composition.singletons(4, 0.25)
        report = event_count_experiment(x0, self.kernel, 0.5, tau=0.1, windows=5, replicas=200, seed=2)
        self.assertAlmostEqual(report['s_h'], 8.0)
        self.assertAlmostEqual(report['envelope_mean'], 0.8)
        self.assertAlmostEqual(report['envelope_second'], 0.8 * 1.8)
        self.assertGreaterEqual(report['s_h_safe'], report['s_h'])
        self.assertLessEqual(report['mean'], report['envelope_mean'] + 3 * report['mean_se'])
        self.assertLessEqual(report['second_moment'], report['envelope_second'] + 3 * report['second_moment_se'])
        with self.assertRaises(FragCoagInputException):
            event_count_experiment(x0, self.kernel, 0.5, tau=0.1, windows=0, replicas=10)


def run_tests():
    l = unittest.TestLoader()
    runner = unittest.TextTestRunner()
    print("\n\nTesting Chain Simulator")
    result = runner.run(l.loadTestsFromTestCase(TestCTMC)).wasSuccessful()

    if not result:
        raise Exception("Failed test")

if __name__ == '__main__':
    run_tests()
