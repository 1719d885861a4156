"""
Convergence and consistency experiments driven by JSON specifications
"""
import logging
import os

from ..io import write_sidecar, write_table
from .runners import (BoundsTable, CouplingCheck, DPCompare, DriftCheck, EventCount, Example1D, ExperimentResult, ExperimentRunner,
                      PolicyTrajectoryConvergence, RUNNERS, TrajectoryConvergence, ValueConvergence, run_trajectory_convergence,
                      run_value_convergence, runner_for)
from .spec import KINDS, ExperimentSpec

logger = logging.getLogger(__name__)


def run_experiment(spec: ExperimentSpec, output: str = None, **kwargs) -> ExperimentResult:
    """
    Run an experiment and, when an output path is given (argument or spec.output), write the CSV table and its JSON sidecar (same path with suffix .json)
    """
    result = runner_for(spec.kind, **kwargs).run(spec)
    output = output or spec.output
    if output:
        directory = os.path.dirname(os.path.abspath(output))
        os.makedirs(directory, exist_ok=True)
        write_table(result.table, output)
        write_sidecar(os.path.splitext(output)[0] + '.json', spec.to_json(), spec.seed,
                      {'kind': spec.kind, 'spec_sha256': spec.hash, 'notes': result.notes, 'scaling': result.scaling, 'ledger': result.summary})
    return result


__all__ = ['BoundsTable', 'CouplingCheck', 'DPCompare', 'DriftCheck', 'EventCount', 'Example1D', 'ExperimentResult', 'ExperimentRunner',
           'ExperimentSpec', 'KINDS', 'PolicyTrajectoryConvergence', 'RUNNERS', 'TrajectoryConvergence', 'ValueConvergence',
           'run_experiment', 'run_trajectory_convergence', 'run_value_convergence', 'runner_for']
