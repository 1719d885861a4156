"""
Explicit error-bound constants for the convergence of the controlled chain to its mean-field limit, and validation of scaling sequences h -> 0.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Sequence

import numpy as np

from ..exceptions import ConfigError, FragCoagInputException, StateSpaceError
from ..kernels import KernelBounds

logger = logging.getLogger(__name__)

_FLOAT_MAX = np.finfo(float).max


@dataclass(frozen=True)
class ScalingConfig:
    """
    One point of a scaling sequence: scale h, decision step tau(h), player count N(h), horizon T and radius R, with the kernel, reward and action constants entering the bounds.

    Args:
        h (float): Rescaling parameter
        tau (float): Decision step
        N (int): Number of players N(h), with h*N <= R
        T (float): Horizon
        R (float): Radius of S
        kernel (KernelBounds): Declared kernel constants C, F, C1, F1, C2, F2
        K_B (float): Lipschitz constant of the rewards
        B_inf (float): Sup bound of the rewards
        K_alpha (float): Lipschitz constant of the action function
        p (int): Number of discontinuities of the action function
        alpha_inf (float): sup |alpha(t)|
    """
    h: float
    tau: float
    N: int
    T: float
    R: float = 1.0
    kernel: KernelBounds = field(default_factory=KernelBounds)
    K_B: float = 0.0
    B_inf: float = 0.0
    K_alpha: float = 0.0
    p: int = 0
    alpha_inf: float = 0.0

    def __post_init__(self):
        if not self.h > 0 or not self.R > 0:
            raise FragCoagInputException("h and R must be positive (h={}, R={})".format(self.h, self.R))
        if self.tau < 0 or self.T < 0 or self.N < 1:
            raise FragCoagInputException("Need tau >= 0, T >= 0 and N >= 1 (tau={}, T={}, N={})".format(self.tau, self.T, self.N))
        if min(self.K_B, self.B_inf, self.K_alpha, self.p, self.alpha_inf) < 0:
            raise FragCoagInputException("Reward and action constants must be nonnegative")
        if self.h * self.N > self.R * (1 + 1e-12):
            raise StateSpaceError("h*N = {} exceeds R = {}".format(self.h * self.N, self.R))

    @property
    def n(self) -> int:
        """Number of decision steps floor(T / tau)"""
        return int(math.floor(self.T / self.tau + 1e-9)) if self.tau > 0 else 0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "ScalingConfig":
        try:
            data = dict(data)
            kernel = KernelBounds.from_json(data.pop('kernel', {}))
            return cls(kernel=kernel, **data)
        except TypeError as e:
            raise ConfigError("Invalid scaling config: {}".format(e)) from e


@dataclass(frozen=True)
class BoundsLedger:
    """
    Values of every bound constant for one ScalingConfig. Entries that overflow are +inf and set `overflow`.
    """
    K: float
    L2: float
    M2: float
    R1: float
    R2: float
    I0: float
    I1: float
    I2: float
    L1: float
    s_h: float
    J: float
    I0_prime: float
    B: float
    B_prime: float
    delta: float = 0.0
    overflow: bool = False

    def to_json(self) -> dict:
        return {k: (v if not (isinstance(v, float) and math.isinf(v)) else 'inf') for (k, v) in asdict(self).items()}


def _exp(value: float):
    # exp in extended precision; (result, overflowed)
    result = np.exp(np.longdouble(value))
    if not np.isfinite(result) or result > _FLOAT_MAX:
        return (math.inf, True)
    return (float(result), False)


def kernel_constants(bounds: KernelBounds, R: float) -> dict:
    """K, L2, M2, R1, R2 of a kernel on S = B+(L,R]"""
    (C, F, C1, F1, C2) = (bounds.C, bounds.F, bounds.C1, bounds.F1, bounds.C2)
    mixed = C * R ** 2 + F * R
    return {
        'K': 6 * C * R + 3 * F + 3 * R * (C1 * R + F1),
        'L2': 3 * C * R ** 2 + 3 * F * R,
        'M2': 3 * (C1 * R ** 2 + 2 * C * R + F1 * R + F),
        'R1': 3 * mixed * (6 * C * R + 3 * F + 3 * C1 * R ** 2 + F1 * R),
        'R2': 54 * mixed * (C + F1 + C1 * R + F1 * R + C2 * R ** 2),
    }


def _reward_bound(cfg: ScalingConfig, I0: float, I1: float, L1: float, J: float, delta: float) -> float:
    (tau, T, K_B, B_inf) = (cfg.tau, cfg.T, cfg.K_B, cfg.B_inf)
    (growth, _) = _exp(L1 * T)
    if math.isinf(growth):
        return math.inf
    # (e^{L1 T} - 1)/L1 -> T as L1 -> 0
    ratio = math.expm1(L1 * T) / L1 if L1 > 0 else T
    extra = tau / (2 * L1) if L1 > 0 else 0.0
    return tau * B_inf + K_B * math.sqrt(2) * I1 \
        + K_B * (delta + I0 * T) * (growth + ratio) \
        + 3 / 2 ** (1 / 3) * (growth + ratio + extra) ** (2 / 3) * K_B ** (2 / 3) * B_inf ** (1 / 3) * J ** (1 / 3) * (T + 1) ** (2 / 3)


def compute_ledger(cfg: ScalingConfig, delta: float = 0.0) -> BoundsLedger:
    """
    Evaluate every bound constant for a configuration

    Args:
        cfg (ScalingConfig): Scale, horizon and declared constants
        delta (float, optional): Initial-condition error ||X^h(0) - x0|| used in B and B'. Defaults to 0.

    Returns:
        BoundsLedger: all constants

    Example:
        ledger = compute_ledger(ScalingConfig(h=0.01, tau=0.01, N=100, T=1, R=1, kernel=KernelBounds(C=1, F=1)))
        ledger.K  # 9.0
    """
    if delta < 0:
        raise FragCoagInputException("delta must be nonnegative")
    base = kernel_constants(cfg.kernel, cfg.R)
    (C, F, R) = (cfg.kernel.C, cfg.kernel.F, cfg.R)
    (h, tau, N, T) = (cfg.h, cfg.tau, cfg.N, cfg.T)
    rate = C * R ** 2 + F
    sqrt_N = math.sqrt(N)

    I0 = sqrt_N * tau / 2 * (base['R1'] + h * base['R2'])
    I1 = tau * rate
    I2 = rate * (tau * rate + h)
    (growth, overflow) = _exp(base['M2'] * sqrt_N * tau)
    L1 = base['K'] * growth
    s_h = rate / h
    J = 8 * T * (L1 ** 2 * (I2 * tau ** 2 + I1 ** 2 * (T + tau)) + N ** 2 * (2 * I2 + tau * base['L2'] ** 2))

    (damping, over_damping) = _exp((base['K'] - L1) * T) if not math.isinf(L1) else (0.0, False)
    switches = min(1 / tau, cfg.p) if tau > 0 else cfg.p
    I0_prime = I0 + tau * base['K'] * damping * (cfg.K_alpha / 2 + 2 * (1 + switches) * cfg.alpha_inf)

    B = _reward_bound(cfg, I0, I1, L1, J, delta)
    B_prime = _reward_bound(cfg, I0_prime, I1, L1, J, delta)
    overflow = overflow or over_damping or any(math.isinf(v) for v in (L1, J, B, B_prime))
    if overflow:
        logger.warning("Bounds ledger overflowed for h=%g, tau=%g, N=%d", h, tau, N)
    return BoundsLedger(K=base['K'], L2=base['L2'], M2=base['M2'], R1=base['R1'], R2=base['R2'],
                        I0=I0, I1=I1, I2=I2, L1=L1, s_h=s_h, J=J, I0_prime=I0_prime, B=B, B_prime=B_prime,
                        delta=delta, overflow=overflow)


SCALING_QUANTITIES = ('hN^2', 'tauN^2', 'tau*sqrt(N)')


def scaling_quantities(cfg: ScalingConfig) -> dict:
    """h*N^2, tau*N^2 and tau*sqrt(N): each must tend to 0 along an admissible sequence"""
    return {
        'hN^2': cfg.h * cfg.N ** 2,
        'tauN^2': cfg.tau * cfg.N ** 2,
        'tau*sqrt(N)': cfg.tau * math.sqrt(cfg.N),
    }


def validate_scaling(sequence: Sequence[ScalingConfig]) -> List[dict]:
    """
    Check that h*N^2, tau*N^2 and tau*sqrt(N) tend to 0 along a sequence of decreasing h

    A quantity passes at config k if it is zero, or smaller than at the first config (it has decreased overall as h decreased). The first config passes by convention.

    Args:
        sequence (Sequence[ScalingConfig]): Configs ordered by decreasing h

    Returns:
        list[dict]: per config: h, the three quantities, 'passed' (bool) and 'failed' (names of offending quantities)

    Raises:
        FragCoagInputException: The sequence is not ordered by strictly decreasing h
    """
    hs = [cfg.h for cfg in sequence]
    if any(b >= a for (a, b) in zip(hs, hs[1:])):
        raise FragCoagInputException("Scaling sequence must be ordered by strictly decreasing h")
    rows = []
    first = scaling_quantities(sequence[0]) if sequence else {}
    for (k, cfg) in enumerate(sequence):
        values = scaling_quantities(cfg)
        failed = [] if k == 0 else [q for q in SCALING_QUANTITIES if values[q] > 0 and values[q] >= first[q]]
        row = {'h': cfg.h, 'tau': cfg.tau, 'N': cfg.N}
        row.update(values)
        row['passed'] = not failed
        row['failed'] = failed
        rows.append(row)
        if failed:
            logger.info("Scaling config h=%g fails on %s", cfg.h, ', '.join(failed))
    return rows


def ledger_sequence(sequence: Sequence[ScalingConfig], delta: float = 0.0) -> dict:
    """
    Ledgers along a scaling sequence, with a flag per constant telling whether I0, I1, I2 and J decrease monotonically

    Returns:
        dict: {'ledgers': [BoundsLedger, ...], 'monotone': {'I0': bool, 'I1': bool, 'I2': bool, 'J': bool}}
    """
    ledgers = [compute_ledger(cfg, delta) for cfg in sequence]
    monotone = {}
    for name in ('I0', 'I1', 'I2', 'J'):
        values = [getattr(ledger, name) for ledger in ledgers]
        monotone[name] = all(b < a for (a, b) in zip(values, values[1:]))
    return {'ledgers': ledgers, 'monotone': monotone}


def admissible_sequence(kernel: KernelBounds, T: float = 1.0, R: float = 1.0, levels: int = 4, **kwargs) -> List[ScalingConfig]:
    """
    The sequence h_k = 8^-k, N = R*h^(-1/3) (rounded), tau = h, for k = 1..levels. Along it h*N^2, tau*N^2 and tau*sqrt(N) all vanish.
    """
    sequence = []
    for k in range(1, levels + 1):
        h = 8.0 ** -k
        N = max(int(round(R * 2 ** k)), 1)
        sequence.append(ScalingConfig(h=h, tau=h, N=N, T=T, R=R, kernel=kernel, **kwargs))
    return sequence
