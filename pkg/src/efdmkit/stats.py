"""Descriptive statistics and eCDF divergence diagnostics for 1-D samples.

All statistics use the population convention (divide by ``n``). Every
reduction runs over a sorted float64 copy of the input, so results depend
only on the multiset of values: a shuffled vector summarizes to the same
bits as the original.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptySampleError


@dataclass(frozen=True)
class StatsSummary:
    mean: float
    std: float
    skewness: float
    kurtosis: float
    linf: float
    n: int

    def as_dict(self) -> dict:
        return asdict(self)


def _as_sample(v, what: str = "sample") -> np.ndarray:
    arr = np.asarray(v)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise EmptySampleError(what)
    return arr


def summarize(v, standardized_linf: bool = False) -> StatsSummary:
    """Mean, std, skewness, kurtosis and max-abs of a sample.

    Args:
        v: 1-D sample (anything ``np.asarray`` accepts; higher rank is flattened).
        standardized_linf: report ``max |(v - mean) / std|`` instead of the raw
            ``max |v|``. Zero for constant samples.

    For a constant sample ``std`` is 0 and skewness/kurtosis are reported as 0.
    """
    arr = _as_sample(v)
    s = np.sort(arr.astype(np.float64, copy=False))
    n = s.size
    mean = float(np.sum(s) / n)
    dev = s - mean
    var = float(np.sum(dev * dev) / n)
    std = float(np.sqrt(var))
    if std > 0.0:
        z = dev / std
        z2 = z * z
        skew = float(np.sum(z2 * z) / n)
        kurt = float(np.sum(z2 * z2) / n)
    else:
        skew = kurt = 0.0
    if standardized_linf:
        linf = float(np.max(np.abs(dev)) / std) if std > 0.0 else 0.0
    else:
        linf = float(max(abs(s[0]), abs(s[-1])))
    return StatsSummary(mean, std, skew, kurt, linf, int(n))


def ecdf_eval(v, t: float) -> float:
    """Fraction of samples ``<= t``."""
    arr = _as_sample(v)
    return float(np.count_nonzero(arr <= t)) / arr.size


def ecdf(v):
    """Return the eCDF of ``v`` as a vectorized callable."""
    s = np.sort(_as_sample(v))
    n = s.size

    def F(t):
        return np.searchsorted(s, t, side="right") / n

    return F


def ks_distance(a, b) -> float:
    """Exact sup-norm distance between the eCDFs of two samples.

    Both eCDFs are right-continuous step functions that only jump at sample
    points, so evaluating at the merged sample points gives the exact supremum.
    """
    a = np.sort(_as_sample(a, "sample a"))
    b = np.sort(_as_sample(b, "sample b"))
    dtype = np.result_type(a.dtype, b.dtype)
    a = a.astype(dtype, copy=False)
    b = b.astype(dtype, copy=False)
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def _bit_view(arr: np.ndarray) -> np.ndarray:
    if arr.dtype.kind == "f":
        # -0.0 and 0.0 are different stored values
        return np.ascontiguousarray(arr).view(f"u{arr.dtype.itemsize}")
    return arr


def equivalent_percent(v) -> float:
    """Percentage of elements whose stored value occurs at least twice.

    Every member of a tie group counts, so ``[1, 1, 2]`` gives 66.67.
    """
    arr = _as_sample(v)
    _, inverse, counts = np.unique(_bit_view(arr), return_inverse=True, return_counts=True)
    tied = np.count_nonzero(counts[inverse.ravel()] >= 2)
    return 100.0 * tied / arr.size


def histogram(v, bins: int = 64):
    """Fixed-width histogram over ``[min, max]`` of the sample.

    Returns ``(counts, edges)`` like :func:`numpy.histogram`.
    """
    arr = _as_sample(v).astype(np.float64, copy=False)
    return np.histogram(arr, bins=bins)
