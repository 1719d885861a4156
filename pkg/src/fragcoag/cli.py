"""
Command-line interface: fragcoag <command> [options]

Exit codes: 0 on success, 2 on a configuration or input error, 3 when a numerical scheme aborts.
"""
import argparse
import logging
import sys

import numpy as np
import pandas as pd

from .bounds import ScalingConfig, admissible_sequence, compute_ledger, validate_scaling
from .control import ActionFunction, ShapleyDP, load_policy, load_reward, value_mc
from .exceptions import FragCoagException, FragCoagInputException, NumericalInstabilityError
from .experiments import ExperimentSpec, run_experiment
from .io import dump_json, load_state, read_json, write_table
from .kernels import load_kernel, scalar_function
from .meanfield import OdeConfig, default_K_max, integrate
from .reduced1d import GridHJBSolver, TerminalSpec, optimal_branch, value_closed_form
from .simulators import CTMCSimulator, contraction_experiment, decision_count
from .state import Composition, MeanFieldState, random_composition, to_mean_field

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def parse_grid(text: str) -> np.ndarray:
    """Control grid from "start:stop:step" (stop included) or a comma-separated list"""
    try:
        if ':' in text:
            (start, stop, step) = (float(v) for v in text.split(':'))
            return np.linspace(start, stop, int(round((stop - start) / step)) + 1)
        return np.array([float(v) for v in text.split(',')])
    except ValueError as e:
        raise FragCoagInputException("Invalid grid '{}': {}".format(text, e)) from e


def _kernel(arg: str):
    return load_kernel({'type': 'constant'} if arg == 'constant' else read_json(arg))


def _chain_start(args) -> Composition:
    if args.x0 is not None:
        state = load_state(read_json(args.x0))
        if not isinstance(state, Composition):
            raise FragCoagInputException("--x0 must be a composition for the chain")
        return state
    return Composition.singletons(args.N, args.m0 / args.N)


def _control(args):
    if getattr(args, 'policy', None):
        return load_policy(read_json(args.policy))
    if getattr(args, 'action', None):
        return ActionFunction.from_json(read_json(args.action))
    return args.b


def _emit(table: pd.DataFrame, output: str):
    if output:
        write_table(table, output)
    else:
        table.to_csv(sys.stdout, index=False, float_format='%.12g', lineterminator='\n')


def cmd_simulate(args) -> int:
    x0 = _chain_start(args)
    simulator = CTMCSimulator(_kernel(args.kernel), literal_generator=args.literal_generator, n_workers=args.workers)
    tau = args.tau if args.tau is not None else args.T
    replicas = simulator.simulate_replicas(x0, _control(args), args.T, tau, seed=args.seed, replicas=args.replicas)
    rows = [{'replica': r, 't': t, 'm': c.m, 'coalitions': c.coalition_count, 'size': k, 'count': n_k}
            for (r, traj) in enumerate(replicas) for (t, c) in zip(traj.times, traj.states) for (k, n_k) in sorted(c.items())]
    _emit(pd.DataFrame(rows, columns=['replica', 't', 'm', 'coalitions', 'size', 'count']), args.output)
    return EXIT_OK


def cmd_meanfield(args) -> int:
    if args.x0 is not None:
        state = load_state(read_json(args.x0))
        x0 = to_mean_field(state, max(state.N, 1)) if isinstance(state, Composition) else state
    else:
        x0 = MeanFieldState([args.m0])
    cfg = OdeConfig(args.K_max or default_K_max(x0), args.dt)
    path = integrate(x0, _control(args), args.T, cfg, _kernel(args.kernel))
    every = max(int(args.every), 1)
    mass = path.mass()
    rows = [{'t': path.times[i], 'm': path.states[i].sum(), 'mass': mass[i], 'size': k + 1, 'x': path.states[i, k]}
            for i in range(0, len(path.times), every) for k in range(cfg.K_max)]
    _emit(pd.DataFrame(rows), args.output)
    return EXIT_OK


def cmd_dp(args) -> int:
    dp = ShapleyDP(_kernel(args.kernel), parse_grid(args.Egrid), args.tau, state_cap=args.state_cap)
    space = dp.space(args.N, args.h)
    result = dp.solve(space, load_reward(read_json(args.reward)), args.n)
    dump_json(result.to_json(), sys.stdout)
    return EXIT_OK


def cmd_value(args) -> int:
    x0 = _chain_start(args)
    control = _control(args)
    n = args.n if args.n is not None else getattr(control, 'n', None)
    if n is None:
        raise FragCoagInputException("--n is required unless the policy defines it")
    tau = args.tau if args.tau is not None else getattr(control, 'tau', None)
    if tau is None:
        raise FragCoagInputException("--tau is required unless the policy defines it")
    (value, se) = value_mc(x0, control, load_reward(read_json(args.reward)), _kernel(args.kernel), tau, n, args.replicas, args.seed,
                           n_workers=args.workers)
    dump_json({'value': value, 'se': se, 'replicas': args.replicas, 'seed': args.seed}, sys.stdout)
    return EXIT_OK


def cmd_example1d_solve(args) -> int:
    terminal = TerminalSpec.from_expression(args.V0, args.mstar)
    (branch, b) = optimal_branch(args.m0, args.T, args.mstar)
    dump_json({'branch': branch, 'b': b, 'value': value_closed_form(0.0, args.m0, args.T, terminal)}, sys.stdout)
    return EXIT_OK


def cmd_example1d_grid(args) -> int:
    terminal = TerminalSpec.from_expression(args.V0, args.mstar)
    running = None if args.B is None else _running(args.B)
    solver = GridHJBSolver(scalar_function(args.fC), scalar_function(args.fB), running)
    result = solver.solve(terminal, args.T, np.linspace(0.0, args.m_max, args.m_points), np.linspace(0.0, 1.0, args.b_points), args.dt)
    _emit(result.to_frame(max(int(args.every), 1)), args.output)
    return EXIT_OK


def _running(text: str):
    reward = load_reward({'B': text, 'V0': '0'})
    return reward.B


def cmd_coupling(args) -> int:
    rng = np.random.default_rng(args.seed)
    h = args.m0 / args.N
    x = random_composition(args.N, h, rng)
    y = random_composition(args.N, h, rng)
    report = contraction_experiment(x, y, _kernel(args.kernel), args.b, args.tau, args.replicas, args.seed, args.points)
    report.update(x=x.to_json(), y=y.to_json())
    dump_json(report, sys.stdout)
    return EXIT_OK


def cmd_bounds(args) -> int:
    kernel = _kernel(args.kernel)
    if args.sequence:
        data = read_json(args.sequence)
        sequence = [ScalingConfig.from_json(dict(entry, kernel=kernel.bounds.to_json())) for entry in data]
    else:
        sequence = admissible_sequence(kernel.bounds, args.T, args.R, args.levels)
    rows = []
    for (cfg, row) in zip(sequence, validate_scaling(sequence)):
        row = dict(row, failed=' '.join(row['failed']))
        row.update(compute_ledger(cfg).to_json())
        rows.append(row)
    _emit(pd.DataFrame(rows), args.output)
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = ExperimentSpec.load(args.spec)
    result = run_experiment(spec, args.output, n_workers=args.workers)
    if not (args.output or spec.output):
        _emit(result.table, None)
    for note in result.notes:
        logger.warning(note)
    return EXIT_OK


def _add_chain_start(p):
    p.add_argument('--x0', help='initial composition JSON {"h": ..., "counts": {...}}')
    p.add_argument('--N', type=int, default=100, help='number of players when starting from singletons')
    p.add_argument('--m0', type=float, default=1.0, help='initial norm when starting from singletons (h = m0/N)')


def _add_control(p, policy: bool = True):
    group = p.add_mutually_exclusive_group()
    group.add_argument('--b', type=float, default=0.5, help='constant control')
    group.add_argument('--action', help='action function JSON')
    if policy:
        group.add_argument('--policy', help='policy JSON')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fragcoag', description='Controlled merging/splitting chains and their mean-field limit')
    parser.add_argument('--log-level', default='WARNING', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('simulate', help='simulate the chain')
    _add_chain_start(p)
    _add_control(p)
    p.add_argument('--kernel', default='constant', help="kernel JSON or 'constant'")
    p.add_argument('--T', type=float, default=1.0)
    p.add_argument('--tau', type=float)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--replicas', type=int, default=1)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--literal-generator', action='store_true', help='weight self-pair merges by n_i^2')
    p.add_argument('--output')
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser('meanfield', help='integrate the mean-field equation')
    p.add_argument('--x0', help='initial state JSON (list x_1..x_K or a composition)')
    p.add_argument('--m0', type=float, default=1.0, help='start from m0 singletons when --x0 is absent')
    _add_control(p, policy=False)
    p.add_argument('--kernel', default='constant')
    p.add_argument('--T', type=float, default=1.0)
    p.add_argument('--dt', type=float, default=1e-3)
    p.add_argument('--K-max', dest='K_max', type=int)
    p.add_argument('--every', type=int, default=10, help='output every k-th grid time')
    p.add_argument('--output')
    p.set_defaults(fn=cmd_meanfield)

    p = sub.add_parser('dp', help='exact dynamic programming on the enumerated state space')
    p.add_argument('--N', type=int, required=True)
    p.add_argument('--h', type=float, help='defaults to 1/N')
    p.add_argument('--kernel', default='constant')
    p.add_argument('--reward', required=True, help='reward JSON {"B": ..., "V0": ...}')
    p.add_argument('--Egrid', default='0:1:0.5', help='"start:stop:step" or comma list')
    p.add_argument('--tau', type=float, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--state-cap', type=int, default=10000)
    p.set_defaults(fn=cmd_dp)

    p = sub.add_parser('value', help='Monte-Carlo value of a policy, action or constant control')
    _add_chain_start(p)
    _add_control(p)
    p.add_argument('--kernel', default='constant')
    p.add_argument('--reward', required=True)
    p.add_argument('--tau', type=float)
    p.add_argument('--n', type=int)
    p.add_argument('--replicas', type=int, default=1000)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--workers', type=int, default=1)
    p.set_defaults(fn=cmd_value)

    p = sub.add_parser('example1d', help='norm-reduced problem')
    example = p.add_subparsers(dest='mode', required=True)
    q = example.add_parser('solve', help='optimal constant control and closed-form value')
    q.add_argument('--V0', required=True, help='terminal reward, expression in m')
    q.add_argument('--mstar', type=float, required=True)
    q.add_argument('--T', type=float, default=1.0)
    q.add_argument('--m0', type=float, required=True)
    q.set_defaults(fn=cmd_example1d_solve)
    q = example.add_parser('grid', help='grid HJB solve for general intensities')
    q.add_argument('--fC', default='1', help='merge intensity, expression in m')
    q.add_argument('--fB', default='1', help='split intensity, expression in m')
    q.add_argument('--B', help='running reward, expression in m and b')
    q.add_argument('--V0', required=True)
    q.add_argument('--mstar', type=float, required=True)
    q.add_argument('--T', type=float, default=1.0)
    q.add_argument('--m-max', dest='m_max', type=float, default=3.99)
    q.add_argument('--m-points', dest='m_points', type=int, default=400)
    q.add_argument('--b-points', dest='b_points', type=int, default=64)
    q.add_argument('--dt', type=float)
    q.add_argument('--every', type=int, default=100)
    q.add_argument('--output')
    q.set_defaults(fn=cmd_example1d_grid)

    p = sub.add_parser('coupling', help='marching-soldiers contraction experiment')
    p.add_argument('--N', type=int, default=10)
    p.add_argument('--m0', type=float, default=1.0)
    p.add_argument('--kernel', default='constant')
    p.add_argument('--b', type=float, default=0.5)
    p.add_argument('--tau', type=float, default=0.1)
    p.add_argument('--points', type=int, default=8)
    p.add_argument('--replicas', type=int, default=1000)
    p.add_argument('--seed', type=int, default=0)
    p.set_defaults(fn=cmd_coupling)

    p = sub.add_parser('bounds', help='bound ledger along a scaling sequence')
    p.add_argument('--kernel', default='constant')
    p.add_argument('--sequence', help='JSON list of {"h", "tau", "N", "T", "R", ...}; defaults to the admissible sequence')
    p.add_argument('--levels', type=int, default=4)
    p.add_argument('--T', type=float, default=1.0)
    p.add_argument('--R', type=float, default=1.0)
    p.add_argument('--output')
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser('experiment', help='run an experiment specification')
    experiment = p.add_subparsers(dest='mode', required=True)
    q = experiment.add_parser('run')
    q.add_argument('spec', help='experiment spec JSON')
    q.add_argument('--output', help='CSV path (overrides the spec)')
    q.add_argument('--workers', type=int, default=1)
    q.set_defaults(fn=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.fn(args)
    except NumericalInstabilityError as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_NUMERICAL
    except FragCoagException as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
