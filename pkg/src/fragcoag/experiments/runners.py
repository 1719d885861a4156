"""
Experiment runners: each turns an ExperimentSpec into a long-form table, one row per configuration or observation, annotated with the bound ledger of its configuration.
"""
from abc import ABC, abstractmethod
from copy import deepcopy
import itertools
import logging
from typing import List
from warnings import warn

import numpy as np
import pandas as pd

from ..bounds import ScalingConfig, compute_ledger, ledger_sequence, validate_scaling
from ..control import (ActionFunction, ShapleyDP, construct_policy_from_limit, load_reward, threshold_policy,
                       trajectory_to_action, value_mc)
from ..exceptions import ConfigError
from ..kernels import load_kernel, scalar_function
from ..meanfield import OdeConfig, integrate, limit_value_for_action, smoluchowski_rhs
from ..metrics import calc_metrics, sup_deviation
from ..reduced1d import GridHJBSolver, TerminalSpec, optimal_action, optimal_branch, value_closed_form
from ..simulators import (CTMCSimulator, MarchingSoldiersCoupling, contraction_experiment, decision_count,
                          marginality_check)
from ..state import Composition, random_composition, to_mean_field
from ..utils import run_replicas
from . import spec as kinds
from .spec import ExperimentSpec

logger = logging.getLogger(__name__)


class ExperimentResult():
    """
    Output of a runner

    Args:
        table (pandas.DataFrame): Long-form results
        notes (list[str]): Remarks emitted during the run (skipped columns, failed scaling checks)
        scaling (list[dict]): validate_scaling rows of the sequence, if any
        summary (dict): Run-level results (e.g. monotone decrease of the ledger along the sequence)
    """

    def __init__(self, table: pd.DataFrame, notes: List[str] = None, scaling: List[dict] = None, summary: dict = None):
        self.table = table
        self.notes = list(notes or [])
        self.scaling = list(scaling or [])
        self.summary = dict(summary or {})


class ExperimentRunner(ABC):
    """
    Interface class for experiment runners

    The parameters of a run are the class defaults, updated by the constructor kwargs, then by the spec's options. Budgets (max_replicas, max_N) are desk-scale defaults and can be raised through options.

    Configuration Parameters
    ------------------------------
    T : float
        Horizon. Default 1.
    m0 : float
        Initial norm; the chain starts from N singletons with h = m0/N. Default 1.
    replicas : int
        Replicas per configuration. Default 200.
    dt : float
        Step of the mean-field integrator. Default 1e-3.
    n_workers : int
        Threads for replica runs. Default 1.
    max_replicas, max_N : int
        Budgets. Defaults 10000 and 400.
    """

    kind = None
    default_parameters = {
        'T': 1.0,
        'm0': 1.0,
        'replicas': 200,
        'dt': 1e-3,
        'n_workers': 1,
        'max_replicas': 10000,
        'max_N': 400,
    }

    def __init__(self, **kwargs):
        self.parameters = deepcopy(ExperimentRunner.default_parameters)
        self.parameters.update(deepcopy(self.default_parameters))
        self.parameters.update(kwargs)

    def run(self, spec: ExperimentSpec) -> ExperimentResult:
        if spec.kind != self.kind:
            raise ConfigError("{} cannot run a '{}' experiment".format(type(self).__name__, spec.kind))
        params = deepcopy(self.parameters)
        params.update(spec.options)
        if params['replicas'] > params['max_replicas']:
            raise ConfigError("{} replicas exceed the budget max_replicas={}".format(params['replicas'], params['max_replicas']))
        if any(int(e['N']) > params['max_N'] for e in spec.sequence):
            raise ConfigError("Sequence exceeds the budget max_N={}".format(params['max_N']))
        kernel = load_kernel(spec.kernel)
        notes = []
        configs = [self._scaling_config(e, params, kernel, spec) for e in spec.sequence]
        scaling = self._check_scaling(configs, spec.scaling_check, notes)
        logger.info("Running %s experiment over %d configuration(s)", self.kind, len(configs))
        table = self._run(spec, params, kernel, configs, notes)
        summary = {}
        if configs:
            sequence = ledger_sequence(configs)
            summary = {'ledgers': [ledger.to_json() for ledger in sequence['ledgers']], 'monotone': sequence['monotone']}
        return ExperimentResult(table, notes, scaling, summary)

    def _scaling_config(self, entry: dict, params: dict, kernel, spec: ExperimentSpec) -> ScalingConfig:
        N = int(entry['N'])
        h = float(entry.get('h', params['m0'] / N))
        reward = spec.reward or {}
        return ScalingConfig(h=h, tau=float(entry.get('tau', params['T'])), N=N, T=params['T'], R=max(float(params.get('R', 1.0)), h * N),
                             kernel=kernel.bounds, K_B=float(reward.get('K_B', 0.0)), B_inf=float(reward.get('Binf', 0.0)))

    def _check_scaling(self, configs: List[ScalingConfig], mode: str, notes: List[str]) -> List[dict]:
        if mode == 'off' or len(configs) < 2:
            return []
        rows = validate_scaling(configs)
        failed = [row for row in rows if not row['passed']]
        if failed:
            message = "Scaling sequence fails at h={} on {}".format(failed[0]['h'], ', '.join(failed[0]['failed']))
            if mode == 'strict':
                raise ConfigError(message)
            warn(message)
            notes.append(message)
        return rows

    @staticmethod
    def _with_ledger(row: dict, cfg: ScalingConfig) -> dict:
        row.update({'ledger_' + k: v for (k, v) in compute_ledger(cfg).to_json().items()})
        return row

    @staticmethod
    def _start(cfg: ScalingConfig) -> Composition:
        return Composition.singletons(cfg.N, cfg.h, cfg.R)

    @abstractmethod
    def _run(self, spec: ExperimentSpec, params: dict, kernel, configs: List[ScalingConfig], notes: List[str]) -> pd.DataFrame:
        """Produce the result table"""


def _action(params: dict):
    if 'action' in params:
        return ActionFunction.from_json(params['action'])
    return ActionFunction.constant(float(params['b']), params['T'])


def _with_action_constants(cfg: ScalingConfig, alpha: ActionFunction) -> ScalingConfig:
    data = cfg.to_json()
    data.update(kernel=cfg.kernel, K_alpha=alpha.lipschitz, p=alpha.discontinuities, alpha_inf=alpha.sup_norm())
    return ScalingConfig(**data)


class TrajectoryConvergence(ExperimentRunner):
    """
    sup_t ||X^h(t) - X(t, x0, alpha)|| over replicas for each configuration, under a fixed action function

    Options: b (constant action, default 0.5) or action (ActionFunction JSON), epsilon (deviation threshold, default 0.1), points (observation grid size, default 101), norm ('l2' or 'l1')
    """
    kind = kinds.TRAJECTORY_CONVERGENCE
    default_parameters = {'b': 0.5, 'epsilon': 0.1, 'points': 101, 'norm': 'l2'}

    def _run(self, spec, params, kernel, configs, notes):
        alpha = _action(params)
        query = np.linspace(0.0, params['T'], int(params['points']))
        rows = []
        for (k, cfg) in enumerate(configs):
            cfg = _with_action_constants(cfg, alpha)
            x0 = self._start(cfg)
            K = max(cfg.N, 1)
            decisions = cfg.tau * np.arange(decision_count(cfg.T, cfg.tau))
            limit = integrate(to_mean_field(x0, K), alpha, cfg.T, OdeConfig(K, params['dt']), kernel, align=decisions).at(query)
            simulator = CTMCSimulator(kernel, n_workers=params['n_workers'])

            def body(r: int, rng: np.random.Generator) -> float:
                traj = simulator.simulate(x0, alpha, cfg.T, cfg.tau, query, rng=rng)
                return sup_deviation(traj.affine_interpolation(K, query), limit, params['norm'])

            metrics = calc_metrics(run_replicas(body, spec.seed, params['replicas'], params['n_workers']), threshold=params['epsilon'])
            logger.info("Config %d/%d (N=%d): mean sup deviation %.4g", k + 1, len(configs), cfg.N, metrics['mean'])
            rows.append(self._with_ledger({'N': cfg.N, 'h': cfg.h, 'tau': cfg.tau, 'replicas': params['replicas'],
                                           'mean_sup_deviation': metrics['mean'], 'se': metrics['standard error'],
                                           'median_sup_deviation': metrics['median'], 'max_sup_deviation': metrics['max'],
                                           'epsilon': params['epsilon'], 'prob_exceed': metrics['fraction above threshold']}, cfg))
        return pd.DataFrame(rows)


class PolicyTrajectoryConvergence(ExperimentRunner):
    """
    Chain under a feedback policy pi against the limit path X(t, x0, A_pi^h) driven by the controls the chain realized, replica by replica

    Options: m_target, below, above (threshold policy; defaults 1, 0, 1), epsilon, points, norm
    """
    kind = kinds.POLICY_TRAJECTORY_CONVERGENCE
    default_parameters = {'m_target': 1.0, 'below': 0.0, 'above': 1.0, 'epsilon': 0.1, 'points': 101, 'norm': 'l2'}

    def _run(self, spec, params, kernel, configs, notes):
        query = np.linspace(0.0, params['T'], int(params['points']))
        rows = []
        for cfg in configs:
            x0 = self._start(cfg)
            K = max(cfg.N, 1)
            n = decision_count(cfg.T, cfg.tau)
            policy = threshold_policy(params['m_target'], cfg.tau, n, params['below'], params['above'])
            simulator = CTMCSimulator(kernel)
            ode = OdeConfig(K, params['dt'])
            x_limit = to_mean_field(x0, K)

            def body(r: int, rng: np.random.Generator) -> float:
                traj = simulator.simulate(x0, policy, cfg.T, cfg.tau, query, rng=rng)
                action = trajectory_to_action(traj, policy, cfg.tau, n)
                limit = integrate(x_limit, action, cfg.T, ode, kernel).at(query)
                return sup_deviation(traj.affine_interpolation(K, query), limit, params['norm'])

            metrics = calc_metrics(run_replicas(body, spec.seed, params['replicas'], params['n_workers']), threshold=params['epsilon'])
            rows.append(self._with_ledger({'N': cfg.N, 'h': cfg.h, 'tau': cfg.tau, 'replicas': params['replicas'],
                                           'mean_sup_deviation': metrics['mean'], 'se': metrics['standard error'],
                                           'epsilon': params['epsilon'], 'prob_exceed': metrics['fraction above threshold']}, cfg))
        return pd.DataFrame(rows)


def _is_zero(B, points: int = 5) -> bool:
    grid = np.linspace(0.0, 2.0, points)
    return all(B(m, b) == 0 for (m, b) in itertools.product(grid, (0.0, 0.5, 1.0)))


class ValueConvergence(ExperimentRunner):
    """
    Monte-Carlo value of the policy built from the limit-optimal action, the DP optimum for small N, the closed-form value of the norm-reduced problem and the limit value of the same action

    Options: m_star (maximizer of V0, required), E_grid (DP controls, default [0, 0.5, 1]), dp_max_N (default 12)
    """
    kind = kinds.VALUE_CONVERGENCE
    default_parameters = {'E_grid': [0.0, 0.5, 1.0], 'dp_max_N': 12}

    def _run(self, spec, params, kernel, configs, notes):
        if spec.reward is None or 'm_star' not in params:
            raise ConfigError("value-convergence needs a reward and the option m_star")
        reward = load_reward(spec.reward)
        terminal = TerminalSpec(float(params['m_star']), reward.V0, check=False)
        closed_form_valid = _is_zero(reward.B)
        if not closed_form_valid:
            notes.append("Running reward is not zero: closed-form column omitted")
        rows = []
        for cfg in configs:
            x0 = self._start(cfg)
            n = decision_count(cfg.T, cfg.tau)
            alpha = optimal_action(x0.m, cfg.T, terminal)
            policy = construct_policy_from_limit(x0, reward, cfg.T, cfg.tau, alpha)
            (v_mc, se) = value_mc(x0, policy, reward, kernel, cfg.tau, n, params['replicas'], spec.seed, n_workers=params['n_workers'])
            closed = value_closed_form(0.0, x0.m, cfg.T, terminal) if closed_form_valid else np.nan
            limit = limit_value_for_action(x0, alpha, cfg.T, reward, kernel, dt=params['dt'])
            if cfg.N <= params['dp_max_N']:
                dp = ShapleyDP(kernel, params['E_grid'], cfg.tau)
                dp_value = dp.solve(dp.space(cfg.N, cfg.h), reward, n).value(x0)
            else:
                dp_value = np.nan
                note = "DP column omitted for N={} > dp_max_N={}".format(cfg.N, params['dp_max_N'])
                warn(note)
                notes.append(note)
            # The closed form solves the norm-reduced problem, which is exact only at b = 1; gaps are taken against the limit
            rows.append(self._with_ledger({'N': cfg.N, 'h': cfg.h, 'tau': cfg.tau, 'n': n, 'b': alpha.at(0.0),
                                           'value_mc': v_mc, 'value_mc_se': se, 'closed_form': closed, 'limit_value': limit,
                                           'gap_mc': abs(v_mc - limit), 'dp_value': dp_value, 'gap_dp': abs(dp_value - limit)},
                                          _with_action_constants(cfg, alpha)))
        return pd.DataFrame(rows)


class DPCompare(ExperimentRunner):
    """
    Exact DP value against the exhaustive search over Markov policies and against every open-loop control sequence, the latter also estimated by Monte Carlo

    Options: N (default 3), n (default 2), tau (default 0.5), E_grid (default [0, 0.5, 1])
    """
    kind = kinds.DP_COMPARE
    default_parameters = {'N': 3, 'n': 2, 'tau': 0.5, 'E_grid': [0.0, 0.5, 1.0]}

    def _run(self, spec, params, kernel, configs, notes):
        if spec.reward is None:
            raise ConfigError("dp-compare needs a reward")
        reward = load_reward(spec.reward)
        (N, n, tau) = (int(params['N']), int(params['n']), float(params['tau']))
        x0 = Composition.singletons(N, params['m0'] / N)
        dp = ShapleyDP(kernel, params['E_grid'], tau)
        space = dp.space(N, x0.h)
        result = dp.solve(space, reward, n)
        rows = [{'kind': 'dp', 'label': 'optimal', 'value': result.value(x0), 'se': 0.0}]
        (best, _) = dp.exhaustive_search(space, reward, n, x0)
        rows.append({'kind': 'exhaustive', 'label': 'best Markov policy', 'value': best, 'se': 0.0})
        (mc, se) = value_mc(x0, result.policy, reward, kernel, tau, n, params['replicas'], spec.seed, n_workers=params['n_workers'])
        rows.append({'kind': 'dp-policy-mc', 'label': 'optimal', 'value': mc, 'se': se})
        for (sequence, exact) in dp.openloop_values(space, reward, n, x0).items():
            label = ' '.join('{:g}'.format(b) for b in sequence)
            rows.append({'kind': 'openloop', 'label': label, 'value': exact, 'se': 0.0})
            (mc, se) = value_mc(x0, ActionFunction.staircase(sequence, tau), reward, kernel, tau, n, params['replicas'], spec.seed,
                                n_workers=params['n_workers'])
            rows.append({'kind': 'openloop-mc', 'label': label, 'value': mc, 'se': se})
        table = pd.DataFrame(rows)
        table.insert(0, 'N', N)
        return table


class Example1D(ExperimentRunner):
    """
    Norm-reduced problem: branch, optimal constant and closed-form value per initial norm, optionally against the grid HJB solver

    Options: V0 (expression in m, default "-(m - m_star)**2"), m_star (default 1), m0_values (default [m0]), grid (bool, default False), m_max, m_points, b_points, f_C, f_B
    """
    kind = kinds.EXAMPLE_1D
    default_parameters = {'m_star': 1.0, 'V0': None, 'm0_values': None, 'grid': False, 'm_max': 3.99, 'm_points': 400, 'b_points': 64,
                          'f_C': None, 'f_B': None}

    def _run(self, spec, params, kernel, configs, notes):
        m_star = float(params['m_star'])
        if params['V0'] is None:
            terminal = TerminalSpec.quadratic(m_star)
        else:
            terminal = TerminalSpec.from_expression(params['V0'], m_star)
        m0_values = params['m0_values'] or [params['m0']]
        grid = None
        if params['grid']:
            f_C = None if params['f_C'] is None else scalar_function(params['f_C'])
            f_B = None if params['f_B'] is None else scalar_function(params['f_B'])
            grid = GridHJBSolver(f_C, f_B).solve(terminal, params['T'], np.linspace(0.0, params['m_max'], int(params['m_points'])),
                                                 np.linspace(0.0, 1.0, int(params['b_points'])))
        rows = []
        for m0 in m0_values:
            (branch, b) = optimal_branch(float(m0), params['T'], m_star)
            rows.append({'m0': m0, 'm_star': m_star, 'T': params['T'], 'branch': branch, 'b': b,
                         'value_closed_form': value_closed_form(0.0, float(m0), params['T'], terminal),
                         'value_grid': grid.value_at(0.0, float(m0)) if grid is not None else np.nan})
        return pd.DataFrame(rows)


class CouplingCheck(ExperimentRunner):
    """
    Contraction of the marching-soldiers coupling on a time grid and a chi-square check of its X-marginal

    Options: N (default 10), b (default 0.5), tau (grid spacing, default 0.1), points (default 8), marginality_N (default 4), marginality_replicas (default 2000)
    """
    kind = kinds.COUPLING_CHECK
    default_parameters = {'N': 10, 'b': 0.5, 'tau': 0.1, 'points': 8, 'marginality_N': 4, 'marginality_replicas': 2000}

    @staticmethod
    def _pair(N: int, h: float, rng: np.random.Generator):
        x = random_composition(N, h, rng)
        y = random_composition(N, h, rng)
        while y == x and N > 1:
            y = random_composition(N, h, rng)
        return (x, y)

    def _run(self, spec, params, kernel, configs, notes):
        rng = np.random.default_rng(spec.seed)
        N = int(params['N'])
        (x, y) = self._pair(N, params['m0'] / N, rng)
        report = contraction_experiment(x, y, kernel, params['b'], params['tau'], params['replicas'], spec.seed, int(params['points']),
                                        MarchingSoldiersCoupling(kernel, n_workers=params['n_workers']))
        rows = [{'check': 'contraction', 'N': N, 'time': t, 'value': m, 'se': s, 'bound': e, 'passed': bool(m - 3 * s <= e)}
                for (t, m, s, e) in zip(report['times'], report['mean'], report['se'], report['envelope'])]
        M = int(params['marginality_N'])
        (x, y) = self._pair(M, params['m0'] / M, rng)
        check = marginality_check(x, y, kernel, params['b'], params['tau'] * params['points'], int(params['marginality_replicas']), spec.seed)
        rows.append({'check': 'marginality', 'N': M, 'time': params['tau'] * params['points'], 'value': check['p_value'],
                     'se': np.nan, 'bound': 0.01, 'passed': bool(check['p_value'] > 0.01)})
        return pd.DataFrame(rows)


class BoundsTable(ExperimentRunner):
    """Ledger and scaling quantities for every configuration of the sequence"""
    kind = kinds.BOUNDS

    def _run(self, spec, params, kernel, configs, notes):
        scaling = validate_scaling(configs) if configs else []
        rows = []
        for (cfg, row) in zip(configs, scaling):
            row = dict(row)
            row['failed'] = ' '.join(row['failed'])
            rows.append(self._with_ledger(row, cfg))
        return pd.DataFrame(rows)


class DriftCheck(ExperimentRunner):
    """
    Monte-Carlo drift F^h(x, b)/tau against the mean-field vector field f(x, b) at random (x, b), within the ledger's I0 plus three standard errors

    Options: N (default 50), pairs (default 20), tau (default 0.01)
    """
    kind = kinds.DRIFT_CHECK
    default_parameters = {'N': 50, 'pairs': 20, 'tau': 0.01, 'replicas': 1000}

    def _run(self, spec, params, kernel, configs, notes):
        rng = np.random.default_rng(spec.seed)
        N = int(params['N'])
        h = params['m0'] / N
        tau = float(params['tau'])
        I0 = compute_ledger(ScalingConfig(h=h, tau=tau, N=N, T=params['T'], R=max(float(params.get('R', 1.0)), h * N), kernel=kernel.bounds)).I0
        simulator = CTMCSimulator(kernel, n_workers=params['n_workers'])
        rows = []
        for k in range(int(params['pairs'])):
            x = random_composition(N, h, rng)
            b = float(rng.uniform())
            (drift, se) = simulator.drift_estimate(x, b, tau, params['replicas'], seed=spec.seed + k, K_max=N)
            (f, _) = smoluchowski_rhs(x.to_array(N), kernel, b)
            deviation = float(np.linalg.norm(drift / tau - f))
            se_norm = float(np.linalg.norm(se)) / tau
            rows.append({'pair': k, 'N': N, 'b': b, 'deviation': deviation, 'se': se_norm, 'I0': I0,
                         'passed': bool(deviation <= I0 + 3 * se_norm)})
        return pd.DataFrame(rows)


class EventCount(ExperimentRunner):
    """
    Per-window event-count moments against the Poisson envelopes s_h*tau and s_h*tau*(1 + s_h*tau)

    Options: N (default 50), b (default 0.5), tau (default 0.01), windows (default 10)
    """
    kind = kinds.EVENT_COUNT
    default_parameters = {'N': 50, 'b': 0.5, 'tau': 0.01, 'windows': 10, 'replicas': 1000}

    def _run(self, spec, params, kernel, configs, notes):
        N = int(params['N'])
        x0 = Composition.singletons(N, params['m0'] / N)
        report = CTMCSimulator(kernel, n_workers=params['n_workers']).event_count_experiment(
            x0, params['b'], float(params['tau']), int(params['windows']), params['replicas'], spec.seed)
        report.update(N=N, tau=params['tau'], windows=params['windows'])
        report['mean_within_envelope'] = bool(report['mean'] - 3 * report['mean_se'] <= report['envelope_mean_safe'])
        report['second_within_envelope'] = bool(report['second_moment'] - 3 * report['second_moment_se'] <= report['envelope_second_safe'])
        return pd.DataFrame([report])


RUNNERS = {cls.kind: cls for cls in (TrajectoryConvergence, PolicyTrajectoryConvergence, ValueConvergence, DPCompare, Example1D,
                                     CouplingCheck, BoundsTable, DriftCheck, EventCount)}


def runner_for(kind: str, **kwargs) -> ExperimentRunner:
    try:
        return RUNNERS[kind](**kwargs)
    except KeyError:
        raise ConfigError("Unknown experiment kind '{}'".format(kind)) from None


def run_trajectory_convergence(spec: ExperimentSpec, **kwargs) -> pd.DataFrame:
    """Mean sup-deviation and exceedance probability per configuration, see TrajectoryConvergence"""
    return TrajectoryConvergence(**kwargs).run(spec).table


def run_value_convergence(spec: ExperimentSpec, **kwargs) -> pd.DataFrame:
    """Chain values against the limit per configuration, see ValueConvergence"""
    return ValueConvergence(**kwargs).run(spec).table
