from .flow import (GROW, REACH, SHRINK, band, bstar, integrate_norm, m_flow, m_flow_numeric, m_flow_uncorrected_denominator,
                   optimal_branch)
from .value import TerminalSpec, optimal_action, value_closed_form
from .grid_dp import GridHJBResult, GridHJBSolver, grid_dp_generalized

__all__ = ['GROW', 'REACH', 'SHRINK', 'band', 'bstar', 'integrate_norm', 'm_flow', 'm_flow_numeric', 'm_flow_uncorrected_denominator',
           'optimal_branch', 'TerminalSpec', 'optimal_action', 'value_closed_form', 'GridHJBResult', 'GridHJBSolver', 'grid_dp_generalized']
