"""
JSON configuration loading and experiment output: long-form CSV tables with a JSON sidecar.
"""
import hashlib
import json
import logging
import os
from typing import Union

import numpy as np
import pandas as pd

from .exceptions import ConfigError
from .state import Composition, MeanFieldState

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12g'


def read_json(path: str):
    """Parse a JSON file; a missing or malformed file is a ConfigError"""
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError("File not found: {}".format(path)) from None
    except json.JSONDecodeError as e:
        raise ConfigError("Invalid JSON in {}: {}".format(path, e)) from e


def resolve(value, base_dir: str = None):
    """A JSON object given inline, or the content of the file it names (relative to base_dir)"""
    if isinstance(value, str):
        path = value if base_dir is None or os.path.isabs(value) else os.path.join(base_dir, value)
        return read_json(path)
    return value


def load_state(data: Union[dict, list], R: float = None) -> Union[Composition, MeanFieldState]:
    """
    Initial state from JSON: {"h": ..., "counts": {"k": n_k}} for the chain, a list (or {"x": [...]}) for the mean-field system
    """
    if isinstance(data, dict) and 'counts' in data:
        return Composition.from_json(data, R)
    if isinstance(data, dict) and 'x' in data:
        data = data['x']
    if isinstance(data, list):
        return MeanFieldState(data, R)
    raise ConfigError("Unrecognized state JSON (expected 'counts' or a list)")


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for (k, v) in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    return value


def canonical_json(data) -> str:
    """JSON text with sorted keys and no whitespace; non-finite floats become strings"""
    return json.dumps(_plain(data), sort_keys=True, separators=(',', ':'))


def config_hash(data) -> str:
    """SHA-256 of the canonical JSON form"""
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def write_table(table: pd.DataFrame, path: str):
    """Long-form CSV; identical tables give identical bytes"""
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info("Wrote %d rows to %s", len(table), path)


def write_sidecar(path: str, config: dict, seed: int, extra: dict = None):
    """
    JSON description of a run: config, its hash, the master seed and the replica seeding rule
    """
    sidecar = {
        'config': _plain(config),
        'config_sha256': config_hash(config),
        'master_seed': seed,
        'replica_seeds': 'numpy.random.SeedSequence(master_seed, spawn_key=(replica,))',
    }
    sidecar.update(_plain(extra or {}))
    with open(path, 'w') as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
        f.write('\n')


def dump_json(data, stream=None) -> str:
    """Pretty JSON text of results (numpy values converted)"""
    text = json.dumps(_plain(data), indent=2, sort_keys=True)
    if stream is not None:
        stream.write(text + '\n')
    return text
