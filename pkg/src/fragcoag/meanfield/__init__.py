from .smoluchowski import SmoluchowskiField, generator_apply, mass_drift, smoluchowski_rhs
from .integrator import MeanFieldPath, OdeConfig, default_K_max, integrate, limit_value_for_action, rk4_step, step_grid, value_deterministic

__all__ = ['SmoluchowskiField', 'generator_apply', 'mass_drift', 'smoluchowski_rhs',
           'MeanFieldPath', 'OdeConfig', 'default_K_max', 'integrate', 'limit_value_for_action', 'rk4_step', 'step_grid', 'value_deterministic']
