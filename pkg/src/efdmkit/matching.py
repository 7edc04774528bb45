"""One-dimensional distribution matching transforms.

Every transform maps an input sample ``x`` onto the distribution of a target
sample ``y`` and returns a :class:`MatchOutput`. The outputs carry a backward
context that follows the stop-gradient convention used when these transforms
sit inside a network: the statistics, sort order and target values are
treated as constants, so gradients only flow through the live ``x`` term and
the target receives none.

Methods:

* moment matching (``mean``, ``std``, ``adain``): shift and/or rescale ``x``.
* ``hm``: classical histogram matching through eCDF quantile inversion.
  Equal inputs map to equal outputs, so it is inexact whenever ``x`` has ties.
* ``efdm``: sort-matching. The i-th smallest ``x`` receives the i-th smallest
  ``y``; output and target hold the same multiset of values, bit for bit.
* ``efdmix``: convex mix of the sorted input and sorted target.
"""
from __future__ import annotations

import enum
import sys
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EmptySampleError, LengthMismatchError, MatchError


class Method(str, enum.Enum):
    MEAN = "mean"
    STD = "std"
    ADAIN = "adain"
    HM = "hm"
    EFDM = "efdm"
    EFDMIX = "efdmix"

    @property
    def needs_equal_size(self) -> bool:
        return self in (Method.EFDM, Method.EFDMIX)


class TieBreak(str, enum.Enum):
    QUICKSORT = "quicksort"
    PRESERVE = "preserve"
    RANDOM = "random"
    NEIGHBOR = "neighbor"


_MOMENT_MODES = {Method.MEAN: "mean", Method.STD: "std", Method.ADAIN: "both"}


@dataclass(frozen=True)
class MatchConfig:
    """Method selection and hyper-parameters for a matching run.

    ``lam=None`` means the EFDMix weight is drawn from ``Beta(alpha, alpha)``.
    """

    method: Method = Method.EFDM
    tie_break: TieBreak = TieBreak.QUICKSORT
    lam: Optional[float] = None
    alpha: float = 0.1
    epsilon: float = 1e-5
    seed: Optional[int] = None
    resample: bool = False

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "tie_break", TieBreak(self.tie_break))
        if self.lam is not None and not 0.0 <= self.lam <= 1.0:
            raise MatchError(f"lambda must lie in [0, 1], got {self.lam}")
        if not self.alpha > 0:
            raise MatchError(f"alpha must be > 0, got {self.alpha}")
        if not self.epsilon > 0:
            raise MatchError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class SortPermutation:
    """Ascending sort orders of the input (``tau``) and target (``kappa``)."""

    tau: np.ndarray
    tie_break: TieBreak
    _target: np.ndarray = field(repr=False)

    @cached_property
    def kappa(self) -> np.ndarray:
        # Tied target values are interchangeable, so any ascending order works.
        return np.argsort(self._target, kind="stable")


class Backward:
    """Vector-Jacobian product of a matching transform.

    Statistics, permutations and target values are detached, which makes the
    Jacobian w.r.t. ``x`` a constant diagonal (``scale``) and the Jacobian
    w.r.t. ``y`` zero.
    """

    def __init__(self, n_x: int, n_y: int, scale: float = 1.0):
        self.n_x = n_x
        self.n_y = n_y
        self.scale = scale

    def __call__(self, grad):
        g = np.asarray(grad)
        if g.shape != (self.n_x,):
            raise LengthMismatchError(f"upstream gradient has shape {g.shape}, expected ({self.n_x},)")
        grad_x = g.copy() if self.scale == 1.0 else g * self.scale
        return grad_x, np.zeros(self.n_y, dtype=g.dtype)


@dataclass
class MatchOutput:
    values: np.ndarray
    backward: Backward
    permutation: Optional[SortPermutation] = None
    lambda_used: Optional[float] = None
    surrogate: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def forward_at(self, x_live) -> np.ndarray:
        """Re-evaluate the transform at ``x_live`` with every detached term frozen.

        This is the function whose derivative :attr:`backward` implements;
        it is what a finite-difference check should perturb.
        """
        if self.surrogate is None:
            raise MatchError("this transform has no differentiable surrogate")
        return self.surrogate(np.asarray(x_live, dtype=np.float64))


def _sample(v, name: str) -> np.ndarray:
    arr = np.asarray(v)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise EmptySampleError(name)
    return arr


def _float_dtype(*arrays) -> np.dtype:
    dt = np.result_type(*arrays)
    return dt if dt.kind == "f" else np.dtype(np.float64)


def _check_same_length(x: np.ndarray, y: np.ndarray) -> None:
    if x.size != y.size:
        raise LengthMismatchError(
            f"sort-matching needs equal lengths, got {x.size} and {y.size}; "
            "resample the target first (tensorops.resample_sorted)"
        )


def moment_match(x, y, mode: str = "both", epsilon: float = 1e-5) -> MatchOutput:
    """Match the mean and/or standard deviation of ``x`` to those of ``y``.

    ``mode`` is ``"mean"`` (shift only), ``"std"`` (rescale about the mean of
    ``x``) or ``"both"`` (AdaIN). ``epsilon`` is added to both variances
    before the square root; 0 is allowed for exact arithmetic.
    """
    x = _sample(x, "input")
    y = _sample(y, "target")
    if epsilon < 0:
        raise MatchError(f"epsilon must be >= 0, got {epsilon}")
    if mode not in ("mean", "std", "both"):
        raise MatchError(f"unknown moment mode {mode!r}")
    out_dtype = _float_dtype(x, y)
    xf = x.astype(np.float64, copy=False)
    yf = y.astype(np.float64, copy=False)
    mu_x, mu_y = float(np.mean(xf)), float(np.mean(yf))

    if mode == "mean":
        scale, center, offset = 1.0, mu_x, mu_y
    else:
        sd_x = float(np.sqrt(np.var(xf) + epsilon))
        sd_y = float(np.sqrt(np.var(yf) + epsilon))
        if sd_x == 0.0:
            raise MatchError("input has zero variance; use epsilon > 0")
        scale = sd_y / sd_x
        center = mu_x
        offset = mu_y if mode == "both" else mu_x

    def surrogate(xl):
        return (xl - center) * scale + offset

    values = surrogate(xf).astype(out_dtype, copy=False)
    return MatchOutput(values, Backward(x.size, y.size, scale), surrogate=surrogate)


def hist_match(x, y) -> MatchOutput:
    """Classical histogram matching by eCDF quantile inversion.

    Each ``x_i`` maps to the ``ceil(F_x(x_i) * m)``-th smallest target value,
    the smallest target quantile whose eCDF reaches ``F_x(x_i)``. Lengths may
    differ. No gradient support.
    """
    x = _sample(x, "input")
    y = _sample(y, "target")
    n, m = x.size, y.size
    ys = np.sort(y)
    tau = _argsort(x, stable=False)
    xs = x[tau]
    # n * F_x at each sorted position: one past the end of its tie group
    is_end = np.empty(n, dtype=bool)
    np.not_equal(xs[1:], xs[:-1], out=is_end[:-1])
    is_end[-1] = True
    group = np.concatenate([[0], np.cumsum(is_end[:-1])])
    counts = (np.flatnonzero(is_end) + 1)[group].astype(np.int64)
    rank = (counts * m + n - 1) // n
    values = np.empty(n, dtype=ys.dtype)
    values[tau] = ys[rank - 1]
    return MatchOutput(values, _no_backward(n, m))


def hist_match_interp(x, y) -> MatchOutput:
    """Histogram matching by linear interpolation between unique-value quantiles.

    Same construction as the common image-library implementation: quantiles of
    the unique input values are looked up on the piecewise-linear quantile
    curve of the unique target values.
    """
    x = _sample(x, "input")
    y = _sample(y, "target")
    xv, xinv, xc = np.unique(x, return_inverse=True, return_counts=True)
    yv, yc = np.unique(y, return_counts=True)
    xq = np.cumsum(xc) / x.size
    yq = np.cumsum(yc) / y.size
    mapped = np.interp(xq, yq, yv)
    return MatchOutput(mapped[xinv.ravel()], _no_backward(x.size, y.size))


def hist_match_binned(x, y, bins: int = 256) -> MatchOutput:
    """Histogram matching on fixed-width bins spanning both samples.

    Every input value is replaced by the target value at the input bin's
    cumulative frequency, read off the target's binned quantile curve.
    Cheaper but coarser than :func:`hist_match`.
    """
    x = _sample(x, "input")
    y = _sample(y, "target")
    if bins < 1:
        raise MatchError(f"bins must be >= 1, got {bins}")
    lo = float(min(x.min(), y.min()))
    hi = float(max(x.max(), y.max()))
    if hi == lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    hx, _ = np.histogram(x, bins=edges)
    hy, _ = np.histogram(y, bins=edges)
    cx = np.cumsum(hx) / x.size
    cy = np.cumsum(hy) / y.size
    lut = np.interp(cx, np.concatenate([[0.0], cy]), edges)
    idx = np.clip(((x - lo) * (bins / (hi - lo))).astype(np.int64), 0, bins - 1)
    return MatchOutput(lut[idx], _no_backward(x.size, y.size))


def _no_backward(n: int, m: int) -> Backward:
    return _UnsupportedBackward(n, m)


class _UnsupportedBackward(Backward):
    def __call__(self, grad):
        raise MatchError("histogram matching is not differentiable")


def _local_mean_3x3(v: np.ndarray, layout: tuple[int, int]) -> np.ndarray:
    h, w = layout
    img = np.pad(v.astype(np.float64).reshape(h, w), 1, mode="edge")
    acc = np.zeros((h, w))
    for dy in range(3):
        for dx in range(3):
            acc += img[dy:dy + h, dx:dx + w]
    return (acc / 9.0).ravel()


_LOW_WORD = slice(0, None, 2) if sys.byteorder == "little" else slice(1, None, 2)


def _argsort_f32(v: np.ndarray) -> np.ndarray:
    """Stable ascending argsort of a native float32 vector.

    Each value is mapped to an order-preserving uint32 key and packed with
    its index into one uint64, so a plain value sort (vectorized in numpy)
    yields the permutation in the low words. Ties come out in index order.
    """
    flip = (v.view(np.int32) >> 31).view(np.uint32) | np.uint32(0x80000000)
    packed = (v.view(np.uint32) ^ flip).astype(np.uint64)
    packed <<= np.uint64(32)
    packed |= np.arange(v.size, dtype=np.uint64)
    packed.sort()
    return packed.view(np.uint32)[_LOW_WORD].astype(np.intp)


def _argsort(v: np.ndarray, stable: bool) -> np.ndarray:
    if v.dtype == np.float32 and v.size < 2**32:
        return _argsort_f32(v)
    return np.argsort(v, kind="stable" if stable else "quicksort")


def sort_permutation(v, tie_break=TieBreak.QUICKSORT, layout=None, rng=None) -> np.ndarray:
    """Indices that sort ``v`` ascending, with ties ordered by ``tie_break``.

    Args:
        v: 1-D sample.
        tie_break: ``quicksort`` (whatever the unstable sort yields),
            ``preserve`` (original index order), ``random`` (uniform among
            ties, needs ``rng``) or ``neighbor`` (3x3 local mean with edge
            clamping, then index; needs ``layout``).
        layout: ``(H, W)`` spatial shape of ``v`` for the neighbor rule.
        rng: ``numpy.random.Generator`` for the random rule.
    """
    v = _sample(v, "sample")
    tie_break = TieBreak(tie_break)
    if tie_break is TieBreak.QUICKSORT:
        return _argsort(v, stable=False)
    if tie_break is TieBreak.PRESERVE:
        return _argsort(v, stable=True)
    if tie_break is TieBreak.RANDOM:
        if rng is None:
            raise MatchError("random tie-break requires an rng")
        p = rng.permutation(v.size)
        return p[_argsort(v[p], stable=True)]
    if layout is None:
        raise MatchError("neighbor tie-break requires a spatial layout (H, W)")
    h, w = layout
    if h * w != v.size:
        raise MatchError(f"layout {layout} does not cover {v.size} samples")
    # lexsort is stable, so the index is the final key
    return np.lexsort((_local_mean_3x3(v, layout), v))


def efdm(x, y, tie_break=TieBreak.QUICKSORT, rng=None, layout=None, tau=None) -> MatchOutput:
    """Exact feature distribution matching by sort-matching.

    The i-th smallest element of ``x`` is replaced by the i-th smallest
    element of ``y``. ``values`` has ``y``'s dtype and exactly ``y``'s multiset
    of values. A precomputed input order can be passed as ``tau``.
    """
    x = _sample(x, "input")
    y = _sample(y, "target")
    _check_same_length(x, y)
    if tau is None:
        tau = sort_permutation(x, tie_break, layout=layout, rng=rng)
    values = np.empty_like(y)
    values[tau] = np.sort(y)
    perm = SortPermutation(tau, TieBreak(tie_break), y)

    def surrogate(xl):
        return xl + values.astype(np.float64) - x.astype(np.float64)

    return MatchOutput(values, Backward(x.size, y.size), permutation=perm, surrogate=surrogate)


def efdmix(x, y, lam: float, tie_break=TieBreak.QUICKSORT, rng=None, layout=None, tau=None) -> MatchOutput:
    """Exact feature distribution mixing.

    ``o = x + (1 - lam) * (sorted-matched y - x)``. ``lam=0`` returns the
    :func:`efdm` values unchanged and ``lam=1`` returns a copy of ``x``.
    """
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise MatchError(f"lambda must lie in [0, 1], got {lam}")
    base = efdm(x, y, tie_break, rng=rng, layout=layout, tau=tau)
    x = _sample(x, "input")
    if lam == 0.0:
        values = base.values
    elif lam == 1.0:
        values = x.copy()
    else:
        dt = _float_dtype(x, base.values)
        xd = x.astype(dt, copy=False)
        values = xd + dt.type(1.0 - lam) * (base.values.astype(dt, copy=False) - xd)
    target = base.values
    w = 1.0 - lam

    def surrogate(xl):
        return xl + w * target.astype(np.float64) - w * x.astype(np.float64)

    return MatchOutput(values, base.backward, permutation=base.permutation,
                       lambda_used=lam, surrogate=surrogate)


def sample_lambda(alpha: float, rng: np.random.Generator) -> float:
    """Draw one mixing weight from ``Beta(alpha, alpha)``."""
    if not alpha > 0:
        raise MatchError(f"alpha must be > 0, got {alpha}")
    return float(rng.beta(alpha, alpha))


def style_interpolate(x, styles: Sequence, weights: Sequence[float],
                      tie_break=TieBreak.QUICKSORT, rng=None, layout=None) -> np.ndarray:
    """Convex combination of the sort-matched outputs of ``x`` against each style.

    The sort order of ``x`` is computed once and shared by every style.
    """
    x = _sample(x, "input")
    if len(styles) == 0 or len(styles) != len(weights):
        raise MatchError(f"need one weight per style, got {len(styles)} styles and {len(weights)} weights")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0):
        raise MatchError("style weights must be non-negative")
    if abs(float(np.sum(w)) - 1.0) > 1e-9:
        raise MatchError(f"style weights must sum to 1, got {float(np.sum(w))!r}")
    styles = [_sample(s, "style") for s in styles]
    for s in styles:
        _check_same_length(x, s)
    tau = sort_permutation(x, tie_break, layout=layout, rng=rng)
    dt = _float_dtype(*styles)
    out = np.zeros(x.size, dtype=dt)
    for wk, s in zip(w, styles):
        out += dt.type(wk) * efdm(x, s, tie_break, tau=tau).values.astype(dt, copy=False)
    return out


def match(x, y, cfg: MatchConfig, rng=None, layout=None, lam: Optional[float] = None) -> MatchOutput:
    """Dispatch one 1-D match according to ``cfg``.

    For EFDMix the weight is ``lam`` if given, else ``cfg.lam``, else a draw
    from ``Beta(cfg.alpha, cfg.alpha)`` using ``rng``.
    """
    method = cfg.method
    if method in _MOMENT_MODES:
        return moment_match(x, y, _MOMENT_MODES[method], cfg.epsilon)
    if method is Method.HM:
        return hist_match(x, y)
    if method is Method.EFDM:
        return efdm(x, y, cfg.tie_break, rng=rng, layout=layout)
    if lam is None:
        lam = cfg.lam
    if lam is None:
        if rng is None:
            raise MatchError("sampling lambda requires an rng")
        lam = sample_lambda(cfg.alpha, rng)
    return efdmix(x, y, lam, cfg.tie_break, rng=rng, layout=layout)
