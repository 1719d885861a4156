"""
This package contains metrics for replica samples produced by the simulators and experiments
"""
from .replica_metrics import calc_metrics, is_decreasing, sup_deviation

__all__ = ['calc_metrics', 'is_decreasing', 'sup_deviation']
