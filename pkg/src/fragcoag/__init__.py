__all__ = ['state', 'kernels', 'simulators', 'meanfield', 'control', 'reduced1d', 'bounds', 'metrics', 'experiments', 'utils']
from . import state, kernels, simulators, meanfield, control, reduced1d, bounds, metrics, experiments, utils

__version__ = '0.1.0'
