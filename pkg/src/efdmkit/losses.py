"""Content, style and combined objectives over supplied feature vectors."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import LengthMismatchError, MatchError
from .matching import TieBreak, efdm


def _distance(a: np.ndarray, b: np.ndarray, reduction: str) -> float:
    d = a.astype(np.float64).ravel() - b.astype(np.float64).ravel()
    if reduction == "l2":
        return float(np.linalg.norm(d))
    if reduction == "mse":
        return float(np.mean(d * d))
    raise MatchError(f"unknown reduction {reduction!r}, expected 'l2' or 'mse'")


def content_loss(f_stylized, s_target, reduction: str = "l2") -> float:
    """Euclidean distance between re-encoded stylized features and their target.

    ``reduction="mse"`` gives the mean squared error instead.
    """
    f = np.asarray(f_stylized)
    s = np.asarray(s_target)
    if f.size != s.size:
        raise LengthMismatchError(f"content loss needs equal lengths, got {f.size} and {s.size}")
    return _distance(f, s, reduction)


def style_loss(stylized_layers: Sequence, style_layers: Sequence,
               tie_break=TieBreak.QUICKSORT, rng=None, reduction: str = "l2") -> float:
    """Sum over layers of the distance between each stylized feature vector and
    its sort-matched copy on the style features of the same layer."""
    if len(stylized_layers) != len(style_layers):
        raise LengthMismatchError(
            f"got {len(stylized_layers)} stylized layers and {len(style_layers)} style layers")
    total = 0.0
    for i, (phi, psi) in enumerate(zip(stylized_layers, style_layers)):
        phi = np.asarray(phi).ravel()
        psi = np.asarray(psi).ravel()
        if phi.size != psi.size:
            raise LengthMismatchError(f"layer {i}: lengths {phi.size} and {psi.size} differ")
        target = efdm(phi, psi, tie_break, rng=rng).values
        total += _distance(phi, target, reduction)
    return total


def combined_loss(content: float, style: float, omega: float) -> float:
    if omega < 0:
        raise MatchError(f"omega must be >= 0, got {omega}")
    return content + omega * style
