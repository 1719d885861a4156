from .ledger import BoundsLedger, ScalingConfig, admissible_sequence, compute_ledger, kernel_constants, ledger_sequence, scaling_quantities, validate_scaling

__all__ = ['BoundsLedger', 'ScalingConfig', 'admissible_sequence', 'compute_ledger', 'kernel_constants', 'ledger_sequence', 'scaling_quantities', 'validate_scaling']
