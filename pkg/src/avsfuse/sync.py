"""Frame-rate synchronization between feature streams at different rates.

Slow streams are brought up to the fast rate by sample-and-hold: a
Bresenham-style digital differential analyzer maps each destination
frame to its source frame with pure integer arithmetic, so index
sequences are exact and monotone for any rational rate pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import feature_matrix
from .errors import ValidationError


@dataclass(frozen=True)
class RatePair:
    """Source and destination frame rates in Hz."""

    src_rate: float
    dst_rate: float

    def __post_init__(self):
        if self.src_rate <= 0 or self.dst_rate <= 0:
            raise ValidationError("frame rates must be positive")


def dda_indices(src_len: int, rates: RatePair, dst_len: int) -> np.ndarray:
    """Map destination frames to source frames: floor(t * src/dst), clamped.

    The ratio is taken as an exact fraction, so the accumulator never
    drifts the way repeated float addition would.
    """
    if src_len < 1 or dst_len < 1:
        raise ValidationError("src_len and dst_len must be at least 1")
    ratio = Fraction(rates.src_rate) / Fraction(rates.dst_rate)
    num, den = ratio.numerator, ratio.denominator
    idx = (np.arange(dst_len, dtype=np.int64) * num) // den
    return np.minimum(idx, src_len - 1)


def resample_features(m: np.ndarray, rates: RatePair, dst_len: int) -> np.ndarray:
    """Sample-and-hold resampling: output row t repeats input row dda(t)."""
    m = feature_matrix(m)
    if m.shape[0] < 1:
        raise ValidationError("cannot resample an empty matrix")
    return m[dda_indices(m.shape[0], rates, dst_len)]


def early_concat(
    audio: np.ndarray,
    vs: np.ndarray | None,
    va: np.ndarray | None,
    rates: RatePair,
) -> np.ndarray:
    """Per-frame concatenation [audio | VS | VA] after resampling video.

    Note the concatenation order differs from the bundle stream order
    (A, VA, VS): stacked feature vectors put shape before appearance.
    Passing ``vs=None, va=None`` returns the audio features unchanged.
    """
    audio = feature_matrix(audio)
    if audio.shape[0] < 1:
        raise ValidationError("audio stream is empty")
    if vs is None and va is None:
        return audio.copy()
    if vs is None or va is None:
        raise ValidationError("vs and va must both be given or both be None")
    parts = [audio]
    for m in (vs, va):
        m = feature_matrix(m)
        if m.shape[0] < 1:
            raise ValidationError("video stream is empty")
        parts.append(resample_features(m, rates, audio.shape[0]))
    return np.concatenate(parts, axis=1)
