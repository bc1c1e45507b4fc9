"""Dataset format round trips, validation errors, and split behavior."""

import json
from collections import Counter

import pytest

from digitink import synth
from digitink.dataset import (
    Dataset,
    DatasetFormatError,
    SubjectMeta,
    dataset_stats,
    largest_remainder,
    load_dataset,
    save_dataset,
    split,
    validate_against_schema,
)
from digitink.strokes import Glyph, Stroke, TouchPoint


def tiny_dataset(n_per_digit=1) -> Dataset:
    glyphs = []
    for d in range(10):
        for k in range(n_per_digit):
            pts = [TouchPoint(float(i * 10 + d), float(i * 5), i * 16.0) for i in range(4)]
            glyphs.append(
                Glyph(
                    strokes=[Stroke(pts)],
                    label=d,
                    glyph_id=f"g{d}-{k}",
                    subject_id="s1",
                )
            )
    return Dataset(glyphs=glyphs, subjects=[SubjectMeta(id="s1", age=30)], provenance="test")


class TestRoundTrip:
    def test_save_load_semantically_identical(self, tmp_path):
        ds = tiny_dataset()
        path = tmp_path / "d.json"
        save_dataset(path, ds)
        loaded = load_dataset(path)
        assert len(loaded.glyphs) == len(ds.glyphs)
        for a, b in zip(loaded.glyphs, ds.glyphs):
            assert a.label == b.label
            assert a.glyph_id == b.glyph_id
            for sa, sb in zip(a.strokes, b.strokes):
                for pa, pb in zip(sa.points, sb.points):
                    assert pa.x == pytest.approx(pb.x, abs=1e-6)
                    assert pa.y == pytest.approx(pb.y, abs=1e-6)
        save_dataset(tmp_path / "d2.json", loaded)
        assert (tmp_path / "d.json").read_bytes() == (tmp_path / "d2.json").read_bytes()

    def test_gzip_round_trip(self, tmp_path):
        ds = tiny_dataset()
        path = tmp_path / "d.json.gz"
        save_dataset(path, ds)
        assert len(load_dataset(path).glyphs) == 10

    def test_empty_dataset_ok(self, tmp_path):
        path = tmp_path / "empty.json"
        save_dataset(path, Dataset())
        loaded = load_dataset(path)
        assert loaded.glyphs == []

    def test_loader_agrees_with_published_schema(self, tmp_path):
        path = tmp_path / "d.json"
        save_dataset(path, tiny_dataset())
        doc = json.loads(path.read_text())
        assert validate_against_schema(doc) == []


class TestValidation:
    def _doc(self):
        return {
            "version": 1,
            "provenance": "",
            "subjects": [{"id": "s1"}],
            "glyphs": [
                {
                    "id": "g1",
                    "subject_id": "s1",
                    "label": 3,
                    "input_method": "finger",
                    "valid": True,
                    "strokes": [[{"x": 0, "y": 0, "t": 0}, {"x": 1, "y": 1, "t": 16}]],
                }
            ],
        }

    def _write(self, tmp_path, doc):
        path = tmp_path / "d.json"
        path.write_text(json.dumps(doc))
        return path

    def test_bad_label_names_glyph_and_field(self, tmp_path):
        doc = self._doc()
        doc["glyphs"][0]["label"] = 12
        with pytest.raises(DatasetFormatError, match=r"glyph g1: field label"):
            load_dataset(self._write(tmp_path, doc))
        assert validate_against_schema(doc)  # schema rejects it too

    def test_unknown_subject(self, tmp_path):
        doc = self._doc()
        doc["glyphs"][0]["subject_id"] = "nope"
        with pytest.raises(DatasetFormatError, match="subject_id"):
            load_dataset(self._write(tmp_path, doc))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_dataset(tmp_path / "missing.json")

    def test_non_monotone_timestamps_flagged_invalid(self, tmp_path):
        doc = self._doc()
        doc["glyphs"][0]["strokes"][0][1]["t"] = -5
        with pytest.warns(UserWarning, match="non-monotone"):
            loaded = load_dataset(self._write(tmp_path, doc))
        assert loaded.glyphs[0].valid is False
        assert loaded.valid_glyphs() == []

    def test_empty_strokes_rejected(self, tmp_path):
        doc = self._doc()
        doc["glyphs"][0]["strokes"] = []
        with pytest.raises(DatasetFormatError, match="strokes"):
            load_dataset(self._write(tmp_path, doc))
        assert validate_against_schema(doc)


class TestSplit:
    def test_balanced_100_gives_6_2_2_per_class(self):
        ds = tiny_dataset(n_per_digit=10)
        assignment = split(ds, seed=1)
        for d in range(10):
            ids = [g.glyph_id for g in ds.glyphs if g.label == d]
            buckets = Counter(assignment.assignment[i] for i in ids)
            assert buckets == Counter({"train": 6, "validation": 2, "test": 2})

    def test_largest_remainder_on_published_total(self):
        assert largest_remainder(20217) == (12130, 4043, 4044)

    def test_deterministic(self):
        ds = tiny_dataset(n_per_digit=7)
        a = split(ds, seed=42).assignment
        b = split(ds, seed=42).assignment
        assert a == b
        c = split(ds, seed=43).assignment
        assert a != c

    def test_partition_total_and_disjoint(self):
        ds = tiny_dataset(n_per_digit=7)
        assignment = split(ds, seed=5)
        ids = [g.glyph_id for g in ds.valid_glyphs()]
        assert sorted(assignment.assignment) == sorted(ids)
        sizes = Counter(assignment.assignment.values())
        assert sum(sizes.values()) == len(ids)

    def test_small_class_warns(self):
        ds = tiny_dataset(n_per_digit=2)
        with pytest.warns(UserWarning, match="best-effort"):
            split(ds, seed=1)

    def test_by_subject_keeps_subjects_together(self):
        glyphs = []
        for s in range(10):
            for k in range(6):
                pts = [TouchPoint(float(i), float(i), i * 16.0) for i in range(3)]
                glyphs.append(
                    Glyph(
                        strokes=[Stroke(pts)],
                        label=k % 10,
                        glyph_id=f"s{s}g{k}",
                        subject_id=f"subj{s}",
                    )
                )
        ds = Dataset(glyphs=glyphs, subjects=[SubjectMeta(id=f"subj{s}") for s in range(10)])
        assignment = split(ds, seed=2, by_subject=True)
        for s in range(10):
            buckets = {assignment.assignment[f"s{s}g{k}"] for k in range(6)}
            assert len(buckets) == 1


class TestStats:
    def test_empty_dataset_all_zero(self):
        report = dataset_stats(Dataset())
        assert report["glyph_count"] == 0
        assert report["max_sequence_length"] == 0
        assert all(v == 0 for v in report["per_digit_counts"].values())

    def test_synthetic_counts(self):
        ds = synth.generate(100, seed=3)
        report = dataset_stats(ds)
        assert all(v == 10 for v in report["per_digit_counts"].values())
        assert report["max_sequence_length"] <= 130
        assert report["per_method_counts"]["finger"] + report["per_method_counts"]["thumb"] == 100
        assert report["arclength_mean_per_digit"][0] > 0
