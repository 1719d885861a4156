from .seeding import mean_and_se, replica_rng, replica_seed, run_replicas

__all__ = ['mean_and_se', 'replica_rng', 'replica_seed', 'run_replicas']
