"""Exact feature distribution matching and its baselines.

Sort-matching (EFDM) and its mixing variant (EFDMix), moment matching
(AdaIN and the mean-only / std-only variants) and classical histogram
matching, applied to 1-D samples, (B, C, H, W) tensors and RGB images.
"""
from .errors import MatchError
from .matching import (
    MatchConfig,
    MatchOutput,
    Method,
    SortPermutation,
    TieBreak,
    efdm,
    efdmix,
    hist_match,
    moment_match,
    sample_lambda,
    sort_permutation,
    style_interpolate,
)
from .losses import combined_loss, content_loss, style_loss
from .stats import StatsSummary, ecdf_eval, equivalent_percent, ks_distance, summarize
from .tensorops import apply_channelwise, resample_sorted, shuffle_pair

__version__ = "0.1.0"
