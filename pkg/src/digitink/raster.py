"""Glyph rasterization to 28x28 grayscale bitmaps.

Each stroke is interpolated with a centripetal Catmull-Rom spline and the
sampled path is stamped with an anti-aliased round brush.  The ink's
bounding box is scaled (aspect preserved) into a 20x20 box and translated
so the path's center of mass lands on the grid center.  Sampling density
depends only on chord-length ratios, so the bitmap is invariant under
translation and uniform scaling of the input coordinates.
"""

from __future__ import annotations

import math

import numpy as np

from . import geometry
from .strokes import Glyph, Stroke, dedupe_stroke

BITMAP_SIDE = 28
FIT_BOX = 20.0
CENTER = 14.0
BRUSH_RADIUS = 0.9  # 1.8 px diameter at the 28-pixel scale

_MIN_PER_SEGMENT = 3
_MAX_PER_SEGMENT = 160
_BUDGET = 160.0


def _dense_path(points: np.ndarray) -> np.ndarray:
    """Sample one stroke's spline; per-segment counts from chord ratios."""
    if len(points) == 1:
        return points.astype(np.float64)
    chords = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = chords.sum()
    if total == 0:
        return points[:1].astype(np.float64)
    per_segment = [
        max(_MIN_PER_SEGMENT, min(_MAX_PER_SEGMENT, math.ceil(_BUDGET * c / total)))
        for c in chords
    ]
    return geometry.sample_spline(points, per_segment)


def glyph_paths(glyph: Glyph) -> list[np.ndarray]:
    """Densely sampled ink path of every stroke (deduped)."""
    paths = []
    for stroke in glyph.strokes:
        deduped = dedupe_stroke(stroke)
        paths.append(_dense_path(deduped.xy()))
    return paths


def ink_transform(paths: list[np.ndarray]) -> tuple[float, np.ndarray]:
    """(scale, offset) mapping ink coordinates into the 28x28 bitmap frame:
    p_out = p * scale + offset."""
    allpts = np.vstack(paths)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    extent = float((hi - lo).max())
    scale = FIT_BOX / extent if extent > 0 else 1.0
    com = allpts.mean(axis=0)
    offset = np.array([CENTER, CENTER]) - com * scale
    return scale, offset


def normalize_glyph(glyph: Glyph) -> Glyph:
    """Apply the rasterization transform to the raw touch points; feeding
    the result back through rasterize reproduces the same bitmap."""
    scale, offset = ink_transform(glyph_paths(glyph))
    strokes = [
        Stroke([type(p)(p.x * scale + offset[0], p.y * scale + offset[1], p.t) for p in s.points])
        for s in glyph.strokes
    ]
    return Glyph(
        strokes=strokes,
        label=glyph.label,
        input_method=glyph.input_method,
        valid=glyph.valid,
        glyph_id=glyph.glyph_id,
        subject_id=glyph.subject_id,
    )


def _stamp(img: np.ndarray, centers: np.ndarray) -> None:
    """Max-composite the brush at every center; linear falloff from full
    intensity at d <= r-0.5 to zero at d >= r+0.5."""
    if len(centers) == 0:
        return
    base = np.round(centers).astype(np.int64)
    offsets = np.arange(-2, 3)
    oy, ox = np.meshgrid(offsets, offsets, indexing="ij")
    px = base[:, 0, None] + ox.ravel()[None, :]  # (M, 25)
    py = base[:, 1, None] + oy.ravel()[None, :]
    d = np.hypot(px - centers[:, 0, None], py - centers[:, 1, None])
    val = np.clip(BRUSH_RADIUS + 0.5 - d, 0.0, 1.0)
    inside = (px >= 0) & (px < BITMAP_SIDE) & (py >= 0) & (py < BITMAP_SIDE) & (val > 0)
    flat = (py[inside] * BITMAP_SIDE + px[inside]).ravel()
    np.maximum.at(img.reshape(-1), flat, val[inside].ravel())


def rasterize(glyph: Glyph) -> np.ndarray:
    """28x28 float array in [0, 1]; 0 is background."""
    if not glyph.strokes or glyph.point_count() == 0:
        raise ValueError("cannot rasterize an empty glyph")
    paths = glyph_paths(glyph)
    scale, offset = ink_transform(paths)
    img = np.zeros((BITMAP_SIDE, BITMAP_SIDE), dtype=np.float64)
    for path in paths:
        _stamp(img, path * scale + offset)
    return np.clip(img, 0.0, 1.0).astype(np.float32)
