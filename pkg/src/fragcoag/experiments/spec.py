"""
Experiment specifications read from JSON.
"""
from dataclasses import asdict, dataclass, field
import os
from typing import List

from ..exceptions import ConfigError
from ..io import config_hash, read_json, resolve

TRAJECTORY_CONVERGENCE = 'trajectory-convergence'
POLICY_TRAJECTORY_CONVERGENCE = 'policy-trajectory-convergence'
VALUE_CONVERGENCE = 'value-convergence'
DP_COMPARE = 'dp-compare'
EXAMPLE_1D = 'example1d'
COUPLING_CHECK = 'coupling-check'
BOUNDS = 'bounds'
DRIFT_CHECK = 'drift-check'
EVENT_COUNT = 'event-count'

KINDS = (TRAJECTORY_CONVERGENCE, POLICY_TRAJECTORY_CONVERGENCE, VALUE_CONVERGENCE, DP_COMPARE, EXAMPLE_1D,
         COUPLING_CHECK, BOUNDS, DRIFT_CHECK, EVENT_COUNT)
SCALING_MODES = ('strict', 'warn', 'off')


@dataclass(frozen=True)
class ExperimentSpec:
    """
    One experiment run

    Args:
        kind (str): One of KINDS
        kernel (dict): Kernel JSON (see load_kernel). Defaults to the constant example kernel.
        reward (dict, optional): Reward JSON (see load_reward)
        sequence (list[dict]): Scaling sequence, entries {"N": ..., "tau": ..., "h": ...} ordered by decreasing h; h defaults to m0/N
        seed (int): Master seed
        output (str, optional): CSV path; the sidecar is written next to it with suffix .json
        options (dict): Runner parameters (see the runner's default_parameters)
        scaling_check (str): 'strict' (refuse a sequence failing validate_scaling), 'warn' or 'off'
    """
    kind: str
    kernel: dict = field(default_factory=lambda: {'type': 'constant'})
    reward: dict = None
    sequence: List[dict] = field(default_factory=list)
    seed: int = 0
    output: str = None
    options: dict = field(default_factory=dict)
    scaling_check: str = 'warn'

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError("Unknown experiment kind '{}' (supported: {})".format(self.kind, ', '.join(KINDS)))
        if self.scaling_check not in SCALING_MODES:
            raise ConfigError("scaling_check must be one of {}".format(SCALING_MODES))
        for entry in self.sequence:
            if not isinstance(entry, dict) or 'N' not in entry:
                raise ConfigError("Every sequence entry needs 'N', got {}".format(entry))
        if not isinstance(self.options, dict) or not isinstance(self.kernel, dict):
            raise ConfigError("'kernel' and 'options' must be JSON objects")

    @classmethod
    def from_json(cls, data: dict, base_dir: str = None) -> "ExperimentSpec":
        """
        Spec from its JSON form; 'kernel', 'reward' and 'sequence' may name files relative to base_dir

        Raises:
            ConfigError: unknown keys, missing referenced files or invalid values
        """
        if not isinstance(data, dict) or 'kind' not in data:
            raise ConfigError("Experiment spec must be a JSON object with a 'kind'")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError("Unknown experiment spec key(s): {}".format(sorted(unknown)))
        data = dict(data)
        for key in ('kernel', 'reward', 'sequence'):
            if key in data and data[key] is not None:
                data[key] = resolve(data[key], base_dir)
        output = data.get('output')
        if output is not None and base_dir is not None and not os.path.isabs(output):
            data['output'] = os.path.join(base_dir, output)
        try:
            data['seed'] = int(data.get('seed', 0))
        except (TypeError, ValueError) as e:
            raise ConfigError("seed must be an integer: {}".format(e)) from e
        return cls(**data)

    @classmethod
    def load(cls, path: str) -> "ExperimentSpec":
        return cls.from_json(read_json(path), os.path.dirname(os.path.abspath(path)))

    def to_json(self) -> dict:
        return asdict(self)

    @property
    def hash(self) -> str:
        """SHA-256 of the spec without its output path"""
        data = self.to_json()
        data.pop('output')
        return config_hash(data)
