"""
Summary statistics of replica samples (deviations, values, event counts), optionally against a reference value.
"""
from typing import Iterable, Union
from warnings import warn

import numpy as np
from scipy import stats

from ..exceptions import FragCoagInputException


def calc_metrics(samples: Union[Iterable[float], np.ndarray], ground_truth: float = None, threshold: float = None) -> dict:
    """Calculate summary metrics of scalar replica samples

    Args:
        samples (array[float]): One value per replica; None and NaN entries are ignored
        ground_truth (float, optional): Reference value (e.g. a closed-form or limit value)
        threshold (float, optional): Report the fraction of samples above it

    Returns:
        dict: collection of metrics

    Example:
        calc_metrics(deviations, threshold=0.1)['fraction above threshold']
    """
    data = np.array([np.nan if s is None else s for s in samples], dtype=float)
    if data.size == 0:
        raise FragCoagInputException('Samples must not be empty')
    kept = np.sort(data[~np.isnan(data)])
    if kept.size == 0:
        raise FragCoagInputException('All samples were None or NaN')
    if kept.size < data.size:
        warn("Some samples were None or NaN, resulting metrics only consider the remaining {} samples".format(kept.size))
    n = kept.size
    mean = float(kept.mean())
    median = float(np.median(kept))
    metrics = {
        'min': float(kept[0]),
        'percentiles': {q: (float(np.percentile(kept, float(q))) if n >= minimum else None)
                        for (q, minimum) in (('1', 100), ('10', 10), ('25', 4), ('50', 1), ('75', 4), ('90', 10), ('99', 100))},
        'median': median,
        'mean': mean,
        'std': float(kept.std(ddof=1)) if n > 1 else 0.0,
        'standard error': float(stats.sem(kept)) if n > 1 else 0.0,
        'max': float(kept[-1]),
        'mean absolute deviation': float(np.abs(kept - mean).mean()),
        'number of samples': n,
    }

    if threshold is not None:
        metrics['fraction above threshold'] = float(np.mean(kept > threshold))

    if ground_truth is not None:
        metrics['mean absolute error'] = float(np.abs(kept - ground_truth).mean())
        metrics['bias'] = mean - ground_truth
        metrics['ground truth percentile'] = float(stats.percentileofscore(kept, ground_truth))
        se = metrics['standard error']
        metrics['standard errors from ground truth'] = abs(metrics['bias']) / se if se > 0 else (0.0 if metrics['bias'] == 0 else np.inf)

    return metrics


def sup_deviation(a: np.ndarray, b: np.ndarray, norm: str = 'l2') -> float:
    """
    sup over time of ||a(t) - b(t)|| for two paths sampled on the same times (arrays of shape (times, K))

    Args:
        norm (str, optional): 'l2' or 'l1'. Defaults to 'l2'.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise FragCoagInputException("Paths must have the same shape, got {} and {}".format(a.shape, b.shape))
    order = {'l2': 2, 'l1': 1}.get(norm)
    if order is None:
        raise FragCoagInputException("Unknown norm '{}' (supported: l1, l2)".format(norm))
    return float(np.linalg.norm(a - b, ord=order, axis=-1).max()) if a.size else 0.0


def is_decreasing(values: Iterable[float], strict: bool = True) -> bool:
    """True if the sequence decreases along its order"""
    values = list(values)
    return all((b < a) if strict else (b <= a) for (a, b) in zip(values, values[1:]))
