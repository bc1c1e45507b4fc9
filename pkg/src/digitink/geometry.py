"""Centripetal Catmull-Rom interpolation of touch polylines.

The interpolant passes through every touch point and the centripetal
parameterization avoids the loops and overshoot uniform Catmull-Rom
produces on uneven point spacing.  Endpoints use linear phantom control
points, so a two-point stroke degenerates to its chord.
"""

from __future__ import annotations

import numpy as np

ALPHA = 0.5  # centripetal knot exponent


def _knots(p0, p1, p2, p3):
    t0 = 0.0
    t1 = t0 + np.linalg.norm(p1 - p0) ** ALPHA
    t2 = t1 + np.linalg.norm(p2 - p1) ** ALPHA
    t3 = t2 + np.linalg.norm(p3 - p2) ** ALPHA
    return t0, t1, t2, t3


def _segment(p0, p1, p2, p3, count: int) -> np.ndarray:
    """Sample the arc from p1 to p2 at `count` interior points (exclusive of
    the endpoints, which callers pin to the knots exactly)."""
    t0, t1, t2, t3 = _knots(p0, p1, p2, p3)
    if t1 == t0 or t2 == t1 or t3 == t2:
        # coincident control points (deduped strokes should not hit this);
        # fall back to the chord
        u = np.linspace(0.0, 1.0, count + 2)[1:-1, None]
        return p1 + u * (p2 - p1)
    t = np.linspace(t1, t2, count + 2)[1:-1, None]
    a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1
    a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2
    a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3
    b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2
    b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3
    return (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2


def sample_spline(points: np.ndarray, per_segment) -> np.ndarray:
    """Dense polyline through `points` (n >= 2, consecutive points distinct).

    `per_segment` is the number of interior samples per segment, either a
    scalar or one entry per segment.  Every touch point appears exactly
    once in the output, so the sampled path interpolates the input.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if n < 2:
        raise ValueError("need at least two points to interpolate")
    if np.isscalar(per_segment):
        per_segment = [int(per_segment)] * (n - 1)
    if len(per_segment) != n - 1:
        raise ValueError("per_segment must have one entry per segment")
    ctrl = np.vstack(
        [2 * points[0] - points[1], points, 2 * points[-1] - points[-2]]
    )
    pieces = []
    for i in range(n - 1):
        pieces.append(points[i : i + 1])
        interior = _segment(ctrl[i], ctrl[i + 1], ctrl[i + 2], ctrl[i + 3], int(per_segment[i]))
        pieces.append(interior)
    pieces.append(points[-1:])
    return np.vstack(pieces)


def polyline_length(samples: np.ndarray) -> float:
    if len(samples) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(samples, axis=0), axis=1).sum())


def segment_lengths(points: np.ndarray, per_segment: int = 16) -> np.ndarray:
    """Sampled arclength of each spline segment between consecutive points."""
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if n < 2:
        return np.zeros(0)
    samples = sample_spline(points, per_segment)
    step = np.linalg.norm(np.diff(samples, axis=0), axis=1)
    # each segment contributed per_segment interior samples + its start knot
    out = np.empty(n - 1)
    stride = per_segment + 1
    for i in range(n - 1):
        out[i] = step[i * stride : (i + 1) * stride].sum()
    return out


def path_arclength(points: np.ndarray, per_segment: int = 16) -> float:
    """Arclength of the interpolated path; >= the chord-sum by construction
    (all touch points lie on the sampled path)."""
    points = np.asarray(points, dtype=np.float64)
    if len(points) < 2:
        return 0.0
    return float(segment_lengths(points, per_segment).sum())


def arclength_profile(points: np.ndarray, per_segment: int = 16) -> np.ndarray:
    """Cumulative interpolated arclength at every touch point (first is 0)."""
    points = np.asarray(points, dtype=np.float64)
    if len(points) < 2:
        return np.zeros(max(len(points), 1))
    return np.concatenate([[0.0], np.cumsum(segment_lengths(points, per_segment))])
