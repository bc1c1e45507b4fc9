"""Model input assembly shared by training, evaluation and serving.

The 1D model reads angles as radians/pi (range [-1, 1]) and vector lengths
standardized by the training split's mean/std; padding rows stay exactly
zero.  The constants travel in the checkpoint so serving can never drift
from training.  The 2D model reads the rasterized bitmap unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import polar, raster
from .errors import DegenerateStrokeError
from .strokes import Glyph, arclength, dedupe_stroke, longest_stroke

INPUT_MODES = ("angle", "distance", "both")


@dataclass
class Normalization:
    """Training-split feature constants, stored in the checkpoint."""

    length_mean: float = 0.0
    length_std: float = 1.0
    class_median_arclength: list[float] = field(default_factory=lambda: [0.0] * 10)

    def to_dict(self) -> dict:
        return {
            "length_mean": self.length_mean,
            "length_std": self.length_std,
            "class_median_arclength": list(self.class_median_arclength),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Normalization":
        return cls(
            length_mean=data.get("length_mean", 0.0),
            length_std=data.get("length_std", 1.0),
            class_median_arclength=list(data.get("class_median_arclength", [0.0] * 10)),
        )


def fit_normalization(glyphs: list[Glyph]) -> Normalization:
    """Length mean/std over the real (non-padding) polar vectors of each
    glyph's longest stroke, plus per-class median glyph arclengths."""
    lengths = []
    per_class: dict[int, list[float]] = {d: [] for d in range(10)}
    for glyph in glyphs:
        total = 0.0
        for stroke in glyph.strokes:
            total += arclength(stroke)
        if glyph.label is not None:
            per_class[glyph.label].append(total)
        stroke = dedupe_stroke(longest_stroke(glyph))
        if len(stroke) < 2:
            continue
        vecs = polar.to_polar_vectors(stroke)
        lengths.append(vecs[: polar.SEQUENCE_LENGTH, 1])
    if lengths:
        cat = np.concatenate(lengths)
        mean = float(cat.mean())
        std = float(cat.std())
    else:
        mean, std = 0.0, 1.0
    medians = [
        float(np.median(per_class[d])) if per_class[d] else 0.0 for d in range(10)
    ]
    return Normalization(mean, std if std > 0 else 1.0, medians)


def polar_input(seq: polar.PolarSequence, mode: str, norm: Normalization) -> np.ndarray:
    """(SEQUENCE_LENGTH, channels) float32; padding rows remain zero."""
    if mode not in INPUT_MODES:
        raise ValueError(f"mode must be one of {INPUT_MODES}, got {mode!r}")
    n = seq.true_length
    angle = seq.vectors[:, 0] / np.pi
    length = np.zeros_like(seq.vectors[:, 1])
    length[:n] = (seq.vectors[:n, 1] - norm.length_mean) / norm.length_std
    if mode == "angle":
        channels = [angle]
    elif mode == "distance":
        channels = [length]
    else:
        channels = [angle, length]
    return np.stack(channels, axis=1).astype(np.float32)


def bitmap_input(glyph: Glyph) -> np.ndarray:
    return raster.rasterize(glyph)[..., None]


@dataclass
class Preprocessor:
    """Glyph -> network input, pinned to one model and its constants."""

    model_name: str  # "bitmap2d" | "polar1d"
    input_mode: Optional[str] = None
    normalization: Normalization = field(default_factory=Normalization)

    def glyph_to_input(self, glyph: Glyph, degenerate_ok: bool = False) -> np.ndarray:
        if self.model_name == "bitmap2d":
            return bitmap_input(glyph)
        stroke = dedupe_stroke(longest_stroke(glyph))
        channels = 2 if self.input_mode == "both" else 1
        if len(stroke) < 2:
            if degenerate_ok:
                return np.zeros((polar.SEQUENCE_LENGTH, channels), dtype=np.float32)
            raise DegenerateStrokeError(
                "glyph's longest stroke has a single distinct point"
            )
        seq = polar.to_polar_sequence(stroke)
        return polar_input(seq, self.input_mode, self.normalization)

    def batch(self, glyphs: list[Glyph], degenerate_ok: bool = False) -> np.ndarray:
        return np.stack([self.glyph_to_input(g, degenerate_ok) for g in glyphs])
