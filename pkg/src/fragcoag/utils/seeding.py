"""
Counter-based replica seeding and the replica fan-out used by every Monte-Carlo routine.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)

T = TypeVar('T')


def replica_seed(master_seed: int, replica: int) -> np.random.SeedSequence:
    """Seed sequence of replica r: a function of (master_seed, r) only"""
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(replica),))


def replica_rng(master_seed: int, replica: int) -> np.random.Generator:
    """Independent generator for replica r of a run seeded with master_seed"""
    return np.random.default_rng(replica_seed(master_seed, replica))


def run_replicas(fn: Callable[[int, np.random.Generator], T], master_seed: int, replicas: int, n_workers: int = 1) -> List[T]:
    """
    Evaluate fn(r, rng_r) for r = 0..replicas-1 and return results in replica order

    Each replica owns its generator, so results do not depend on n_workers or on scheduling.

    Args:
        fn (Callable[[int, Generator], T]): Replica body
        master_seed (int): Master seed of the run
        replicas (int): Number of replicas
        n_workers (int, optional): Threads used. Defaults to 1 (sequential).
    """
    def body(r: int) -> T:
        return fn(r, replica_rng(master_seed, r))

    logger.debug("Running %d replicas (seed %d, %d worker(s))", replicas, master_seed, n_workers)
    if n_workers <= 1:
        return [body(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(body, range(replicas)))


def mean_and_se(samples) -> tuple:
    """
    Sample mean and standard error along the first axis (SE is 0 for fewer than two samples)
    """
    samples = np.asarray(samples, dtype=float)
    mean = samples.mean(axis=0)
    if samples.shape[0] < 2:
        return (mean, np.zeros_like(mean))
    return (mean, stats.sem(samples, axis=0, ddof=1))
