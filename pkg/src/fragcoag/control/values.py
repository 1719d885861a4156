"""
Values of policies and action functions on the chain side and on the limit side, and the two auxiliary systems linking them.
"""
import itertools
import logging
from typing import Sequence

import numpy as np

from ..exceptions import ConfigError, FragCoagInputException, StateSpaceError
from ..kernels import RateKernel
from ..meanfield import OdeConfig, limit_value_for_action, value_deterministic
from ..simulators import CTMCSimulator, Trajectory, decision_count
from ..state import Composition, to_mean_field
from ..utils import mean_and_se, run_replicas
from .action_function import ActionFunction, sample_times
from .policy import Policy, StaticPolicy
from .reward import RewardModel

logger = logging.getLogger(__name__)

DEFAULT_FAMILY_CAP = 100000


def chain_reward(traj: Trajectory, reward: RewardModel, tau: float, n: int) -> float:
    """sum_{k<n} tau*B(x_k, b_k) + V0(x_n) along a trajectory observed at k*tau, k = 0..n"""
    total = sum(tau * reward.running(traj.states[k], traj.decisions[k]) for k in range(n))
    return total + reward.terminal(traj.states[n])


def value_mc(x0: Composition, policy, reward: RewardModel, kernel: RateKernel, tau: float, n: int, replicas: int, seed: int = 0, **kwargs):
    """
    Monte-Carlo estimate of V_pi^h(x0) = E[sum_k tau*B(x_k, pi_k(x_k)) + V0(x_n)]

    Args:
        x0 (Composition): Initial state
        policy: Policy, action function or constant control
        reward (RewardModel): Rewards
        kernel (RateKernel): Rate kernel
        tau (float): Decision step
        n (int): Number of decisions
        replicas (int): Number of replicas
        seed (int, optional): Master seed. Defaults to 0.
        kwargs: Simulator configuration (see CTMCSimulator)

    Returns:
        tuple: (estimate, standard error)
    """
    simulator = CTMCSimulator(kernel, **kwargs)
    T = n * tau
    times = tau * np.arange(n + 1)

    def body(r: int, rng: np.random.Generator) -> float:
        traj = simulator.simulate(x0, policy, T, tau, times, rng=rng)
        return chain_reward(traj, reward, tau, n)

    (mean, se) = mean_and_se(run_replicas(body, seed, replicas, simulator.parameters['n_workers']))
    return (float(mean), float(se))


def action_to_policy(alpha: ActionFunction, tau: float, n: int) -> StaticPolicy:
    """
    First auxiliary system: the state-independent policy pi_k = alpha(k*tau)

    Raises:
        FragCoagInputException: alpha is not defined up to n*tau
    """
    if alpha.T < (n - 1) * tau:
        raise FragCoagInputException("alpha is defined on [0, {}] but decisions go up to {}".format(alpha.T, (n - 1) * tau))
    return StaticPolicy([alpha.at(t) for t in sample_times(tau, n)], tau, {'kind': 'sampled action'})


def trajectory_to_action(traj: Trajectory, policy: Policy, tau: float, n: int) -> ActionFunction:
    """
    Second auxiliary system: the random action A_pi^h, piecewise constant on [k*tau, (k+1)*tau) with the controls realized along traj

    Raises:
        FragCoagInputException: traj was produced with a different tau or fewer than n decisions
    """
    if abs(traj.tau - tau) > 1e-12 or len(traj.decisions) < n or (isinstance(policy, Policy) and policy.n != n):
        raise FragCoagInputException("Trajectory (tau={}, {} decisions) does not match tau={}, n={}".format(traj.tau, len(traj.decisions), tau, n))
    return ActionFunction.staircase(traj.decisions[:n], tau)


def auxiliary_values(x0: Composition, policy: Policy, reward: RewardModel, kernel: RateKernel, tau: float, n: int, replicas: int,
                     cfg: OdeConfig = None, seed: int = 0, **kwargs) -> dict:
    """
    Both sides of the second auxiliary system on the same replicas: the chain value of pi and the limit value v_{A_pi^h}(x0) of the realized action

    Returns:
        dict: 'chain' and 'limit' as (mean, standard error), and 'gap' = |chain mean - limit mean|
    """
    simulator = CTMCSimulator(kernel, **kwargs)
    cfg = OdeConfig(max(x0.N, 1)) if cfg is None else cfg
    x_limit = to_mean_field(x0, cfg.K_max)
    times = tau * np.arange(n + 1)

    def body(r: int, rng: np.random.Generator):
        traj = simulator.simulate(x0, policy, n * tau, tau, times, rng=rng)
        action = trajectory_to_action(traj, policy, tau, n)
        return (chain_reward(traj, reward, tau, n), value_deterministic(x_limit, action, n * tau, reward, cfg, kernel))

    samples = np.array(run_replicas(body, seed, replicas, simulator.parameters['n_workers']))
    (mean, se) = mean_and_se(samples)
    return {'chain': (float(mean[0]), float(se[0])), 'limit': (float(mean[1]), float(se[1])), 'gap': abs(float(mean[0] - mean[1]))}


def construct_policy_from_limit(x0, reward: RewardModel, T: float, tau: float, alpha_star: ActionFunction) -> StaticPolicy:
    """
    Policy pi_k(X(k*tau)) := alpha_star(k*tau) built from an optimal action function of the limiting system. It is asymptotically optimal only.

    Raises:
        ConfigError: the horizon holds no decision (T < tau)
    """
    n = decision_count(T, tau)
    if n == 0:
        raise ConfigError("Horizon T={} is shorter than the decision interval tau={}: no decision to take".format(T, tau))
    policy = action_to_policy(alpha_star, tau, n)
    policy.metadata.update({'kind': 'limit optimal action', 'optimality': 'asymptotic'})
    return policy


def openloop_brute_value(x0, reward: RewardModel, T: float, E_grid: Sequence[float], n: int, kernel: RateKernel,
                         side: str = 'limit', cfg: OdeConfig = None, replicas: int = 100, seed: int = 0, cap: int = DEFAULT_FAMILY_CAP):
    """
    Best piecewise-constant action with n equal pieces over [0, T] and values in E_grid

    Args:
        x0: Initial state (MeanFieldState or array for the limit side, Composition for the chain side)
        reward (RewardModel): Rewards
        T (float): Horizon
        E_grid (Sequence[float]): Control values
        n (int): Number of pieces
        kernel (RateKernel): Rate kernel
        side (str, optional): 'limit' (value_deterministic) or 'chain' (value_mc). Defaults to 'limit'.
        cfg (OdeConfig, optional): Integrator settings for the limit side. Defaults to dt = 1e-3 and the default truncation.
        replicas (int, optional): Replicas for the chain side
        seed (int, optional): Master seed for the chain side
        cap (int, optional): Largest family accepted

    Returns:
        tuple: (best ActionFunction, best value); ties keep the first candidate in lexicographic order of E_grid indices

    Raises:
        StateSpaceError: |E_grid|^n exceeds cap
    """
    size = len(E_grid) ** n
    if size > cap:
        raise StateSpaceError("Open-loop family has {} members, more than the cap of {}".format(size, cap))
    if side not in ('limit', 'chain'):
        raise FragCoagInputException("side must be 'limit' or 'chain'")
    tau = T / n
    (best, best_value) = (None, -np.inf)
    for values in itertools.product(E_grid, repeat=n):
        alpha = ActionFunction.staircase(values, tau)
        if side == 'limit' and cfg is None:
            value = limit_value_for_action(x0, alpha, T, reward, kernel)
        elif side == 'limit':
            value = value_deterministic(x0, alpha, T, reward, cfg, kernel)
        else:
            value = value_mc(x0, action_to_policy(alpha, tau, n), reward, kernel, tau, n, replicas, seed)[0]
        if value > best_value:
            (best, best_value) = (alpha, value)
    logger.debug("Open-loop search over %d candidates: best %.6g", size, best_value)
    return (best, best_value)
