"""Channel-wise matching over rank-4 (B, C, H, W) feature tensors."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptySampleError, MatchError, ShapeMismatchError
from .matching import MatchConfig, Method, TieBreak, match, sample_lambda

AXES = ("B", "C", "H", "W")


@dataclass
class ChannelwiseResult:
    output: np.ndarray
    backward: dict = field(repr=False)  # (b, c) -> Backward
    lambdas: Optional[np.ndarray] = None


def check_tensor(t, name: str = "tensor") -> np.ndarray:
    arr = np.asarray(t)
    if arr.ndim != 4:
        raise MatchError(f"{name} must have rank 4 (B, C, H, W), got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise MatchError(f"{name} has an empty axis: {arr.shape}")
    if arr.dtype.kind != "f":
        arr = arr.astype(np.float64)
    return arr


def resample_sorted(y, n: int) -> np.ndarray:
    """Sorted copy of ``y`` linearly interpolated to length ``n``.

    Element ``j`` sits at fractional index ``j * (m - 1) / (n - 1)`` of the
    sorted sequence, so the min and max are kept. ``n == 1`` gives the median.
    """
    y = np.asarray(y).ravel()
    if y.size == 0:
        raise EmptySampleError("target")
    if n < 1:
        raise MatchError(f"resample length must be >= 1, got {n}")
    ys = np.sort(y)
    m = ys.size
    dt = ys.dtype if ys.dtype.kind == "f" else np.dtype(np.float64)
    if n == m:
        return ys.astype(dt, copy=False)
    if n == 1:
        return np.array([np.median(ys)], dtype=dt)
    pos = np.arange(n) * (m - 1) / (n - 1)
    out = np.interp(pos, np.arange(m), ys.astype(np.float64))
    # keep the endpoints bit-exact
    out[0], out[-1] = ys[0], ys[-1]
    return out.astype(dt)


def shuffle_pair(X, rng: np.random.Generator) -> np.ndarray:
    """Pair each instance with another by permuting the batch axis."""
    X = check_tensor(X, "X")
    return X[rng.permutation(X.shape[0])]


def _spawn(rng, count: int) -> list:
    if rng is None:
        return [None] * count
    return rng.spawn(count)


def apply_channelwise(X, Y, cfg: MatchConfig, rng: Optional[np.random.Generator] = None,
                      workers: int = 1) -> ChannelwiseResult:
    """Run ``cfg.method`` independently on every (batch, channel) row.

    Rows are the flattened ``H * W`` samples. For EFDM/EFDMix the two tensors
    must have identical shapes unless ``cfg.resample`` is set, in which case
    each style row is resampled to the content row length. Moment and
    histogram methods only need matching ``B`` and ``C``.

    EFDMix without a fixed ``cfg.lam`` draws one weight per instance, shared
    by all channels of that instance. Child generators are spawned per
    instance and per row up front, so ``workers > 1`` gives identical output.
    If ``rng`` is None, one is seeded from ``cfg.seed``.
    """
    X = check_tensor(X, "X")
    Y = check_tensor(Y, "Y")
    for i, axis in enumerate(AXES[:2]):
        if X.shape[i] != Y.shape[i]:
            raise ShapeMismatchError(axis, X.shape[i], Y.shape[i])
    if cfg.method.needs_equal_size and not cfg.resample:
        for i, axis in enumerate(AXES[2:], start=2):
            if X.shape[i] != Y.shape[i]:
                raise ShapeMismatchError(axis, X.shape[i], Y.shape[i])
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    B, C, H, W = X.shape
    xr = X.reshape(B, C, H * W)
    yr = Y.reshape(B, C, -1)
    needs_rng = cfg.tie_break is TieBreak.RANDOM
    lambdas = None
    if cfg.method is Method.EFDMIX:
        if cfg.lam is None:
            lambdas = np.array([sample_lambda(cfg.alpha, r) for r in _spawn(rng, B)])
        else:
            lambdas = np.full(B, cfg.lam)
    row_rngs = _spawn(rng, B * C) if needs_rng else [None] * (B * C)

    def run(bc):
        b, c = divmod(bc, C)
        y = yr[b, c]
        if cfg.method.needs_equal_size and y.size != H * W:
            y = resample_sorted(y, H * W)
        lam = None if lambdas is None else float(lambdas[b])
        return match(xr[b, c], y, cfg, rng=row_rngs[bc], layout=(H, W), lam=lam)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(B * C)))
    else:
        results = [run(bc) for bc in range(B * C)]

    out_dtype = np.result_type(*[r.values.dtype for r in results])
    out = np.empty((B, C, H * W), dtype=out_dtype)
    backward = {}
    for bc, r in enumerate(results):
        b, c = divmod(bc, C)
        out[b, c] = r.values
        backward[(b, c)] = r.backward
    return ChannelwiseResult(out.reshape(B, C, H, W), backward, lambdas)
