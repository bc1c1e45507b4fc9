"""Displacement vectors between consecutive touch points in polar form.

Angles are measured from the positive x axis in [-pi, pi].  Screen y grows
downward while +pi/2 must point up on screen, so the y displacement is
negated: angle = atan2(-dy, dx).  Lengths are in pixels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStrokeError
from .strokes import Stroke

SEQUENCE_LENGTH = 130


@dataclass
class PolarSequence:
    """Fixed-length sequence of (angle, length) rows; rows past true_length
    are exactly (0, 0) padding."""

    vectors: np.ndarray  # (SEQUENCE_LENGTH, 2)
    true_length: int


def to_polar_vectors(stroke: Stroke) -> np.ndarray:
    """(n-1, 2) array of (angle, length) for a deduped stroke of n points."""
    if len(stroke) < 2:
        raise DegenerateStrokeError(
            "degenerate stroke: need at least two distinct points for polar vectors"
        )
    xy = stroke.xy()
    d = np.diff(xy, axis=0)
    if (np.abs(d).sum(axis=1) == 0).any():
        raise DegenerateStrokeError("coincident consecutive points; dedupe the stroke first")
    angle = np.arctan2(-d[:, 1], d[:, 0])
    length = np.hypot(d[:, 0], d[:, 1])
    return np.stack([angle, length], axis=1)


def pad_or_truncate(vectors: np.ndarray, max_len: int = SEQUENCE_LENGTH) -> PolarSequence:
    """Zero-pad to max_len; longer sequences keep their first max_len
    vectors (glyph onsets carry the shape identity) with a warning."""
    vectors = np.asarray(vectors, dtype=np.float64).reshape(-1, 2)
    n = len(vectors)
    if n > max_len:
        warnings.warn(
            f"polar sequence of {n} vectors truncated to {max_len}",
            stacklevel=2,
        )
        return PolarSequence(vectors[:max_len].copy(), max_len)
    out = np.zeros((max_len, 2))
    out[:n] = vectors
    return PolarSequence(out, n)


def to_polar_sequence(stroke: Stroke, max_len: int = SEQUENCE_LENGTH) -> PolarSequence:
    return pad_or_truncate(to_polar_vectors(stroke), max_len)
