"""Canonical dataset format: load/save, validation, stratified splitting
and summary statistics.

One JSON document (gzip-compressed when the path ends in .gz) holds the
schema version, subject roster and glyph records; see
schemas/dataset.schema.json.  Invalid-flagged glyphs are retained on disk
and in the loaded Dataset, but every consumer in this package reads
through valid_glyphs().
"""

from __future__ import annotations

import gzip
import json
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from .errors import DatasetFormatError
from .polar import SEQUENCE_LENGTH, to_polar_vectors
from .strokes import Glyph, Stroke, TouchPoint, arclength, dedupe_stroke, longest_stroke

FORMAT_VERSION = 1
SYNTHETIC_SUBJECT_ID = "synthetic"
BUCKETS = ("train", "validation", "test")
SPLIT_RATIOS = (0.6, 0.2, 0.2)


def schema_document() -> dict:
    """The formal JSON Schema this format is published under."""
    text = resources.files("digitink.schemas").joinpath("dataset.schema.json").read_text()
    return json.loads(text)


def validate_against_schema(doc: dict) -> list[str]:
    """Full (slow) JSON Schema validation; returns error strings.

    The loader itself applies the same constraints with hand-rolled checks
    because per-touch-point schema validation is an order of magnitude too
    slow for training-sized files; tests pin the two paths to agree.
    """
    validator = Draft202012Validator(schema_document())
    return [
        f"{'.'.join(str(p) for p in e.absolute_path) or '(root)'}: {e.message}"
        for e in validator.iter_errors(doc)
    ]


@dataclass
class SubjectMeta:
    id: str
    age: int = 0
    sex: str = "unspecified"
    handedness: str = "unspecified"
    nationality: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "age": self.age,
            "sex": self.sex,
            "handedness": self.handedness,
            "nationality": self.nationality,
        }


@dataclass
class Dataset:
    glyphs: list[Glyph] = field(default_factory=list)
    subjects: list[SubjectMeta] = field(default_factory=list)
    provenance: str = ""

    def valid_glyphs(self) -> list[Glyph]:
        return [g for g in self.glyphs if g.valid]

    def glyph_by_id(self) -> dict[str, Glyph]:
        return {g.glyph_id: g for g in self.glyphs}


def _glyph_to_dict(g: Glyph) -> dict:
    return {
        "id": g.glyph_id,
        "subject_id": g.subject_id or SYNTHETIC_SUBJECT_ID,
        "label": g.label,
        "input_method": g.input_method,
        "valid": g.valid,
        "strokes": [[{"x": p.x, "y": p.y, "t": p.t} for p in s.points] for s in g.strokes],
    }


def _glyph_from_dict(d: dict) -> Glyph:
    return Glyph(
        strokes=[Stroke([TouchPoint(p["x"], p["y"], p["t"]) for p in s]) for s in d["strokes"]],
        label=d["label"],
        input_method=d["input_method"],
        valid=d["valid"],
        glyph_id=d["id"],
        subject_id=d["subject_id"],
    )


def _check_glyph_record(path, index: int, g, known_subjects: set[str]) -> None:
    """Structural checks mirroring the published schema, raising errors
    that name the glyph and the offending field."""
    gid = g.get("id", f"index {index}") if isinstance(g, dict) else f"index {index}"

    def bad(field_name: str, why: str):
        return DatasetFormatError(f"{path}: glyph {gid}: field {field_name}: {why}")

    if not isinstance(g, dict):
        raise bad("(record)", "expected an object")
    if not isinstance(g.get("id"), str) or not g["id"]:
        raise bad("id", "expected a non-empty string")
    if g.get("subject_id") not in known_subjects:
        raise bad("subject_id", f"unknown subject {g.get('subject_id')!r}")
    if not isinstance(g.get("label"), int) or isinstance(g["label"], bool) or not 0 <= g["label"] <= 9:
        raise bad("label", f"expected an integer digit 0-9, got {g.get('label')!r}")
    if g.get("input_method") not in ("finger", "thumb"):
        raise bad("input_method", f"expected finger or thumb, got {g.get('input_method')!r}")
    if not isinstance(g.get("valid"), bool):
        raise bad("valid", "expected a boolean")
    strokes = g.get("strokes")
    if not isinstance(strokes, list) or not strokes:
        raise bad("strokes", "expected a non-empty array of strokes")
    for si, stroke in enumerate(strokes):
        if not isinstance(stroke, list) or not stroke:
            raise bad(f"strokes[{si}]", "expected a non-empty array of touches")
        for pi, p in enumerate(stroke):
            if not isinstance(p, dict) or not {"x", "y", "t"} <= p.keys():
                raise bad(f"strokes[{si}][{pi}]", "expected an object with x, y, t")
            for axis in ("x", "y", "t"):
                v = p[axis]
                if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                    raise bad(f"strokes[{si}][{pi}].{axis}", f"expected a finite number, got {v!r}")


def save_dataset(path, dataset: Dataset) -> None:
    """Deterministic writer: identical datasets produce identical bytes."""
    doc = {
        "version": FORMAT_VERSION,
        "provenance": dataset.provenance,
        "subjects": [s.to_dict() for s in dataset.subjects],
        "glyphs": [_glyph_to_dict(g) for g in dataset.glyphs],
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    path = Path(path)
    if path.suffix == ".gz":
        with open(path, "wb") as fh:
            # filename="" keeps the header free of the output path so
            # identical datasets compress to identical bytes
            with gzip.GzipFile(filename="", fileobj=fh, mode="wb", mtime=0) as gz:
                gz.write(blob)
    else:
        path.write_bytes(blob)


def load_dataset(path) -> Dataset:
    """Parse, schema-validate and semantically check a dataset file.

    Malformed records raise DatasetFormatError naming the glyph and field;
    glyphs with non-monotone stroke timestamps are auto-flagged invalid
    with a warning.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    raw = path.read_bytes()
    if path.suffix == ".gz":
        raw = gzip.decompress(raw)
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"{path}: not valid JSON ({exc})") from exc

    if not isinstance(doc, dict) or doc.get("version") != FORMAT_VERSION:
        raise DatasetFormatError(
            f"{path}: glyph ?: field version: expected {FORMAT_VERSION}, "
            f"got {doc.get('version') if isinstance(doc, dict) else type(doc).__name__}"
        )
    for key in ("subjects", "glyphs"):
        if not isinstance(doc.get(key), list):
            raise DatasetFormatError(f"{path}: glyph ?: field {key}: expected an array")

    subjects = [SubjectMeta(**s) for s in doc["subjects"]]
    known = {s.id for s in subjects} | {SYNTHETIC_SUBJECT_ID}
    glyphs = []
    flagged = 0
    for i, g in enumerate(doc["glyphs"]):
        _check_glyph_record(path, i, g, known)
        glyph = _glyph_from_dict(g)
        if glyph.valid and not all(s.is_monotone() for s in glyph.strokes):
            warnings.warn(
                f"glyph {glyph.glyph_id}: non-monotone timestamps, flagged invalid",
                stacklevel=2,
            )
            glyph.valid = False
            flagged += 1
        glyphs.append(glyph)
    dataset = Dataset(glyphs=glyphs, subjects=subjects, provenance=doc.get("provenance", ""))
    valid = len(dataset.valid_glyphs())
    if flagged:
        warnings.warn(f"{flagged} glyphs auto-flagged invalid", stacklevel=2)
    dataset.load_report = {  # type: ignore[attr-defined]
        "glyphs": len(glyphs),
        "valid": valid,
        "invalid": len(glyphs) - valid,
        "subjects": len(subjects),
    }
    return dataset


# -- splitting ----------------------------------------------------------------


@dataclass
class SplitAssignment:
    """Total, disjoint bucket assignment over the valid glyphs."""

    assignment: dict[str, str]
    seed: int
    by_subject: bool = False

    def ids(self, bucket: str) -> list[str]:
        if bucket not in BUCKETS:
            raise ValueError(f"bucket must be one of {BUCKETS}")
        return [gid for gid, b in self.assignment.items() if b == bucket]

    def glyphs(self, dataset: Dataset, bucket: str) -> list[Glyph]:
        wanted = set(self.ids(bucket))
        return [g for g in dataset.valid_glyphs() if g.glyph_id in wanted]


def largest_remainder(total: int, ratios=SPLIT_RATIOS) -> tuple[int, ...]:
    """Integer allocation of `total` by `ratios`: floors first, leftovers to
    the largest fractional remainders, ties resolved toward later buckets
    (test before validation before train)."""
    exact = [total * r for r in ratios]
    floors = [int(e) for e in exact]
    leftover = total - sum(floors)
    order = sorted(range(len(ratios)), key=lambda i: (exact[i] - floors[i], i), reverse=True)
    for i in order[:leftover]:
        floors[i] += 1
    return tuple(floors)


def split(dataset: Dataset, seed: int, by_subject: bool = False) -> SplitAssignment:
    """Deterministic 60/20/20 split of the valid glyphs, stratified by digit.

    by_subject=True groups whole subjects into buckets instead (no digit
    stratification); it avoids subject leakage at the cost of rougher
    proportions.
    """
    glyphs = dataset.valid_glyphs()
    if not glyphs:
        raise ValueError("cannot split an empty dataset")
    rng = np.random.default_rng(seed)
    assignment: dict[str, str] = {}
    if by_subject:
        subjects = sorted({g.subject_id for g in glyphs})
        counts = {s: 0 for s in subjects}
        for g in glyphs:
            counts[g.subject_id] += 1
        order = [subjects[i] for i in rng.permutation(len(subjects))]
        filled = [0, 0, 0]
        targets = [len(glyphs) * r for r in SPLIT_RATIOS]
        bucket_of = {}
        for s in order:
            deficits = [targets[i] - filled[i] for i in range(3)]
            pick = int(np.argmax(deficits))
            bucket_of[s] = BUCKETS[pick]
            filled[pick] += counts[s]
        for g in glyphs:
            assignment[g.glyph_id] = bucket_of[g.subject_id]
        return SplitAssignment(assignment, seed, by_subject=True)

    by_label: dict[int, list[str]] = {}
    for g in glyphs:
        by_label.setdefault(g.label, []).append(g.glyph_id)
    for label in sorted(by_label):
        ids = by_label[label]
        if len(ids) < 5:
            warnings.warn(
                f"digit {label} has only {len(ids)} examples; split proportions are best-effort",
                stacklevel=2,
            )
        ids = [ids[i] for i in rng.permutation(len(ids))]
        n_train, n_val, n_test = largest_remainder(len(ids))
        for gid in ids[:n_train]:
            assignment[gid] = "train"
        for gid in ids[n_train : n_train + n_val]:
            assignment[gid] = "validation"
        for gid in ids[n_train + n_val :]:
            assignment[gid] = "test"
    return SplitAssignment(assignment, seed)


# -- statistics ---------------------------------------------------------------


def sequence_length(glyph: Glyph) -> int:
    """Polar vector count of the glyph's longest stroke (0 if degenerate)."""
    stroke = dedupe_stroke(longest_stroke(glyph))
    if len(stroke) < 2:
        return 0
    return len(to_polar_vectors(stroke))


def dataset_stats(dataset: Dataset) -> dict:
    """Per-digit and per-method counts, arclength moments per digit, and
    the longest-stroke sequence-length histogram (with its maximum)."""
    glyphs = dataset.valid_glyphs()
    per_digit = {d: 0 for d in range(10)}
    per_method = {"finger": 0, "thumb": 0}
    arclengths: dict[int, list[float]] = {d: [] for d in range(10)}
    histogram: dict[int, int] = {}
    for g in glyphs:
        per_digit[g.label] += 1
        per_method[g.input_method] += 1
        arclengths[g.label].append(sum(arclength(s) for s in g.strokes))
        n = sequence_length(g)
        histogram[n] = histogram.get(n, 0) + 1
    return {
        "glyph_count": len(dataset.glyphs),
        "valid_count": len(glyphs),
        "invalid_count": len(dataset.glyphs) - len(glyphs),
        "subject_count": len(dataset.subjects),
        "per_digit_counts": per_digit,
        "per_method_counts": per_method,
        "arclength_mean_per_digit": {
            d: (float(np.mean(v)) if v else 0.0) for d, v in arclengths.items()
        },
        "arclength_std_per_digit": {
            d: (float(np.std(v)) if v else 0.0) for d, v in arclengths.items()
        },
        "sequence_length_histogram": {str(k): histogram[k] for k in sorted(histogram)},
        "max_sequence_length": max(histogram) if histogram else 0,
        "sequence_length_limit": SEQUENCE_LENGTH,
    }
