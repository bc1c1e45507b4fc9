"""Touch data model: timestamped points, strokes, glyphs, and the
arclength-based operations on them (longest stroke, completion prefix)."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import geometry

INPUT_METHODS = ("finger", "thumb")


@dataclass(frozen=True)
class TouchPoint:
    """One sampled touch.  Screen convention: x grows rightward, y grows
    downward; t is milliseconds from glyph start."""

    x: float
    y: float
    t: float


@dataclass
class Stroke:
    """Points recorded during one continuous contact."""

    points: list[TouchPoint]

    def __len__(self) -> int:
        return len(self.points)

    def xy(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.points], dtype=np.float64)

    def is_monotone(self) -> bool:
        times = [p.t for p in self.points]
        return all(a <= b for a, b in zip(times, times[1:]))


@dataclass
class Glyph:
    """One drawn digit; possibly several strokes."""

    strokes: list[Stroke]
    label: Optional[int] = None
    input_method: str = "finger"
    valid: bool = True
    glyph_id: Optional[str] = None
    subject_id: Optional[str] = None

    def point_count(self) -> int:
        return sum(len(s) for s in self.strokes)


def dedupe_stroke(stroke: Stroke) -> Stroke:
    """Collapse runs of coincident (x, y) points, keeping the earliest."""
    if not stroke.points:
        raise ValueError("empty stroke")
    kept = [stroke.points[0]]
    for p in stroke.points[1:]:
        if p.x != kept[-1].x or p.y != kept[-1].y:
            kept.append(p)
    return Stroke(kept)


def _dedupe_indices(stroke: Stroke) -> list[int]:
    """Indices into the original point list of the deduped points."""
    idx = [0]
    for i, p in enumerate(stroke.points[1:], start=1):
        last = stroke.points[idx[-1]]
        if p.x != last.x or p.y != last.y:
            idx.append(i)
    return idx


def arclength(stroke: Stroke) -> float:
    """Arclength of the interpolated path in pixels; 0 for a single point."""
    deduped = dedupe_stroke(stroke)
    if len(deduped) < 2:
        return 0.0
    return geometry.path_arclength(deduped.xy())


def glyph_arclength(glyph: Glyph) -> float:
    return sum(arclength(s) for s in glyph.strokes)


def longest_stroke(glyph: Glyph) -> Stroke:
    """The stroke of maximal arclength; ties go to the earliest-drawn."""
    if not glyph.strokes:
        raise ValueError("glyph has no strokes")
    best = glyph.strokes[0]
    best_len = arclength(best)
    for stroke in glyph.strokes[1:]:
        length = arclength(stroke)
        if length > best_len:
            best, best_len = stroke, length
    return best


def completion_prefix(glyph: Glyph, fraction: float) -> Glyph:
    """Truncate the glyph to the earliest touch-point prefix (in drawing
    order, across strokes) whose cumulative interpolated arclength reaches
    `fraction` of the total.  fraction >= 1 returns the glyph unchanged."""
    if not 0.0 <= fraction:
        raise ValueError("fraction must be >= 0")
    if fraction >= 1.0:
        return replace(glyph, strokes=[Stroke(list(s.points)) for s in glyph.strokes])
    profiles = []
    for stroke in glyph.strokes:
        indices = _dedupe_indices(stroke)
        pts = np.array([[stroke.points[i].x, stroke.points[i].y] for i in indices])
        if len(indices) < 2:
            profiles.append((indices, np.zeros(1)))
        else:
            profiles.append((indices, geometry.arclength_profile(pts)))
    total = sum(prof[-1] for _, prof in profiles)
    target = fraction * total
    offset = 0.0
    kept: list[Stroke] = []
    for stroke, (indices, prof) in zip(glyph.strokes, profiles):
        for j, orig_index in enumerate(indices):
            if offset + prof[j] >= target:
                kept.append(Stroke(list(stroke.points[: orig_index + 1])))
                return replace(glyph, strokes=kept)
        kept.append(Stroke(list(stroke.points)))
        offset += prof[-1]
    return replace(glyph, strokes=kept)
