from .events import EventLogEntry, EventTable, MERGE, RateSource, SPLIT, apply_event, event_rates, event_table, sample_event
from .schedule import ConstantSchedule, ControlSchedule, SampledActionSchedule, as_schedule, decision_count, window_count
from .trajectory import ReplicaSet, Trajectory
from .ctmc import CTMCSimulator, drift_estimate, event_count_experiment, simulate, step, total_rate
from .generator import chain_generator_apply, generator_matrix
from .coupling import (CoupledState, Coupling, IndependentCoupling, MarchingSoldiersCoupling, contraction_experiment,
                       coupled_step, drift_lipschitz_check, marginality_check)

__all__ = ['EventLogEntry', 'EventTable', 'MERGE', 'RateSource', 'SPLIT', 'apply_event', 'event_rates', 'event_table', 'sample_event',
           'ConstantSchedule', 'ControlSchedule', 'SampledActionSchedule', 'as_schedule', 'decision_count', 'window_count',
           'ReplicaSet', 'Trajectory', 'CTMCSimulator', 'drift_estimate', 'event_count_experiment', 'simulate', 'step', 'total_rate',
           'chain_generator_apply', 'generator_matrix',
           'CoupledState', 'Coupling', 'IndependentCoupling', 'MarchingSoldiersCoupling', 'contraction_experiment',
           'coupled_step', 'drift_lipschitz_check', 'marginality_check']
