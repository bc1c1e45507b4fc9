"""Synthetic glyph generator: desk-scale stand-in for collected touch data.

Each digit has one or more polyline skeleton templates in a unit box
(y grows downward, matching the screen convention).  Generation applies
random affine jitter, resamples each stroke at a simulated 60 Hz with a
randomized pace profile, and adds per-point Gaussian noise.  Everything is
driven by one seeded generator, so identical arguments reproduce the
dataset byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import SYNTHETIC_SUBJECT_ID, Dataset, SubjectMeta
from .strokes import Glyph, Stroke, TouchPoint

GLYPH_BOX_PX = 300.0
SAMPLE_HZ = 60.0
# 60 Hz for at most ~2.05 s keeps every stroke at <= 124 points, safely
# under the 130-vector input limit.
MAX_STROKE_SECONDS = 2.05
MIN_STROKE_SECONDS = 2.0 / SAMPLE_HZ


def _arc(cx, cy, rx, ry, deg0, deg1, n):
    """Elliptic arc in screen coordinates: 0 deg points right, 90 deg down."""
    a = np.radians(np.linspace(deg0, deg1, n))
    return np.stack([cx + rx * np.cos(a), cy + ry * np.sin(a)], axis=1)


def _pts(*coords):
    return np.array(coords, dtype=np.float64)


def _chain(*parts):
    return np.vstack(parts)


# Templates: digit -> list of variants; a variant is a list of stroke
# polylines in the unit box.
TEMPLATES: dict[int, list[list[np.ndarray]]] = {
    0: [
        [_arc(0.5, 0.5, 0.26, 0.40, -90, -450, 24)],
        [_arc(0.5, 0.5, 0.30, 0.38, -80, 280, 24)],
    ],
    1: [
        [_pts((0.5, 0.08), (0.5, 0.36), (0.5, 0.64), (0.5, 0.92))],
        [_pts((0.36, 0.24), (0.5, 0.08), (0.5, 0.36), (0.5, 0.64), (0.5, 0.92))],
    ],
    2: [
        [
            _chain(
                _arc(0.48, 0.30, 0.25, 0.20, 185, 350, 8),
                _pts((0.66, 0.45), (0.52, 0.60), (0.37, 0.73), (0.24, 0.86)),
                _pts((0.42, 0.87), (0.60, 0.87), (0.78, 0.87)),
            )
        ],
    ],
    3: [
        [
            _chain(
                _arc(0.46, 0.29, 0.22, 0.18, 195, 80, 10),
                _arc(0.47, 0.68, 0.24, 0.20, -70, 160, 11),
            )
        ],
    ],
    4: [
        [
            _pts((0.56, 0.08), (0.44, 0.24), (0.31, 0.40), (0.20, 0.56), (0.45, 0.56), (0.68, 0.56), (0.83, 0.56)),
            _pts((0.64, 0.06), (0.64, 0.34), (0.64, 0.64), (0.64, 0.93)),
        ],
        [
            _pts((0.52, 0.10), (0.42, 0.26), (0.30, 0.44), (0.22, 0.58), (0.48, 0.57), (0.80, 0.56)),
            _pts((0.62, 0.30), (0.63, 0.60), (0.63, 0.92)),
        ],
    ],
    5: [
        [
            _chain(
                _pts((0.38, 0.13), (0.35, 0.28), (0.32, 0.42)),
                _arc(0.48, 0.64, 0.22, 0.22, -110, 140, 12),
            ),
            _pts((0.40, 0.12), (0.56, 0.12), (0.72, 0.12)),
        ],
        [
            _chain(
                _pts((0.72, 0.12), (0.54, 0.12), (0.38, 0.13), (0.35, 0.28), (0.32, 0.42)),
                _arc(0.48, 0.64, 0.22, 0.22, -110, 140, 12),
            ),
        ],
    ],
    6: [
        [
            _chain(
                _pts((0.66, 0.10), (0.53, 0.17), (0.43, 0.28), (0.36, 0.42), (0.33, 0.56)),
                _arc(0.49, 0.70, 0.17, 0.16, 180, 540, 14),
            )
        ],
    ],
    7: [
        [
            _pts((0.22, 0.14), (0.46, 0.13), (0.72, 0.12), (0.62, 0.36), (0.50, 0.62), (0.40, 0.88)),
        ],
        [
            _pts((0.22, 0.14), (0.46, 0.13), (0.72, 0.12), (0.62, 0.36), (0.50, 0.62), (0.40, 0.88)),
            _pts((0.34, 0.50), (0.48, 0.50), (0.64, 0.50)),
        ],
    ],
    8: [
        [
            _chain(
                _arc(0.5, 0.30, 0.185, 0.185, 270, 90, 8),
                _arc(0.5, 0.70, 0.225, 0.215, 270, 630, 14),
                _arc(0.5, 0.30, 0.185, 0.185, 90, -90, 8),
            )
        ],
    ],
    9: [
        [
            _chain(
                _arc(0.47, 0.30, 0.20, 0.20, 0, -360, 14),
                _pts((0.66, 0.42), (0.63, 0.58), (0.58, 0.74), (0.52, 0.90)),
            )
        ],
    ],
}


@dataclass
class NoiseProfile:
    """Distortion knobs.  NoiseProfile.none() disables everything, which
    makes generated glyphs equal their template polylines exactly."""

    rotation_deg: float = 15.0
    scale_min: float = 0.7
    scale_max: float = 1.3
    shear_max: float = 0.1
    noise_px: float = 1.5
    resample: bool = True
    speed_mean: float = 450.0  # px/s
    speed_std: float = 80.0
    pace_wobble: float = 0.5
    origin_jitter_px: float = 60.0
    gap_ms: tuple[float, float] = (120.0, 280.0)

    @classmethod
    def none(cls) -> "NoiseProfile":
        return cls(
            rotation_deg=0.0,
            scale_min=1.0,
            scale_max=1.0,
            shear_max=0.0,
            noise_px=0.0,
            resample=False,
            pace_wobble=0.0,
            origin_jitter_px=0.0,
        )


def template_strokes(digit: int, variant: int = 0) -> list[np.ndarray]:
    """The raw skeleton polylines of one variant, scaled to pixel units."""
    return [p * GLYPH_BOX_PX for p in TEMPLATES[digit][variant]]


def _affine(rng: np.random.Generator, profile: NoiseProfile) -> np.ndarray:
    theta = math.radians(rng.uniform(-profile.rotation_deg, profile.rotation_deg))
    scale = rng.uniform(profile.scale_min, profile.scale_max)
    shear = rng.uniform(-profile.shear_max, profile.shear_max)
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    sh = np.array([[1.0, shear], [0.0, 1.0]])
    return scale * rot @ sh


def _smoothstep(u):
    return u * u * (3.0 - 2.0 * u)


def _resample_stroke(points: np.ndarray, rng, profile: NoiseProfile) -> np.ndarray:
    """Walk the polyline at 60 Hz with an eased, randomized pace."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = float(seg.sum())
    if total == 0:
        return points[:1]
    speed = float(np.clip(rng.normal(profile.speed_mean, profile.speed_std), 260.0, 640.0))
    duration = float(np.clip(total / speed, MIN_STROKE_SECONDS, MAX_STROKE_SECONDS))
    count = int(duration * SAMPLE_HZ) + 1
    u = np.linspace(0.0, 1.0, count)
    w = rng.uniform(0.0, profile.pace_wobble)
    pos = ((1.0 - w) * u + w * _smoothstep(u)) * total
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    x = np.interp(pos, cum, points[:, 0])
    y = np.interp(pos, cum, points[:, 1])
    return np.stack([x, y], axis=1)


def generate(count: int, seed: int, profile: NoiseProfile | None = None) -> Dataset:
    """Balanced synthetic dataset: count glyphs, count//10 per digit
    (remainder spread over the lowest digits)."""
    if count <= 0:
        raise ValueError("count must be positive")
    profile = profile if profile is not None else NoiseProfile()
    rng = np.random.default_rng(seed)
    frame_ms = 1000.0 / SAMPLE_HZ
    glyphs = []
    for index in range(count):
        digit = index % 10
        variant = int(rng.integers(len(TEMPLATES[digit])))
        matrix = _affine(rng, profile)
        center = np.array([0.5, 0.5]) * GLYPH_BOX_PX
        origin = rng.uniform(0.0, profile.origin_jitter_px, size=2)
        identity = (matrix == np.eye(2)).all() and (origin == 0).all()
        strokes = []
        t = 0.0
        for raw in template_strokes(digit, variant):
            # identity fast path keeps the degenerate profile bit-exact
            pts = raw.copy() if identity else (raw - center) @ matrix.T + center + origin
            if profile.resample:
                pts = _resample_stroke(pts, rng, profile)
            if profile.noise_px > 0:
                pts = pts + rng.normal(0.0, profile.noise_px, size=pts.shape)
            stroke = Stroke(
                [TouchPoint(float(p[0]), float(p[1]), t + i * frame_ms) for i, p in enumerate(pts)]
            )
            strokes.append(stroke)
            t = stroke.points[-1].t + rng.uniform(*profile.gap_ms)
        glyphs.append(
            Glyph(
                strokes=strokes,
                label=digit,
                input_method="finger" if rng.random() < 0.5 else "thumb",
                valid=True,
                glyph_id=f"synth-{index:06d}",
                subject_id=SYNTHETIC_SUBJECT_ID,
            )
        )
    subject = SubjectMeta(id=SYNTHETIC_SUBJECT_ID, nationality="synthetic")
    return Dataset(
        glyphs=glyphs,
        subjects=[subject],
        provenance=f"synth(count={count},seed={seed})",
    )
