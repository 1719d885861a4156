from .composition import Composition
from .mean_field_state import MeanFieldState, NormReport, norms, to_mean_field
from .partitions import StateSpace, enumerate_compositions, partition_count, random_composition

__all__ = ['Composition', 'MeanFieldState', 'NormReport', 'norms', 'to_mean_field', 'enumerate_compositions', 'StateSpace', 'partition_count', 'random_composition']
