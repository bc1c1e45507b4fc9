"""Stroke preprocessing: dedupe, polar conversion, padding, longest-stroke
selection, rasterization and completion prefixes."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from digitink import polar, raster
from digitink.errors import DegenerateStrokeError
from digitink.features import Normalization, Preprocessor, fit_normalization, polar_input
from digitink.strokes import (
    Glyph,
    Stroke,
    TouchPoint,
    arclength,
    completion_prefix,
    dedupe_stroke,
    longest_stroke,
)


def stroke_from(coords, t0=0.0, dt=16.0):
    return Stroke([TouchPoint(x, y, t0 + i * dt) for i, (x, y) in enumerate(coords)])


def glyph_from(*stroke_coords, label=0):
    return Glyph(strokes=[stroke_from(c) for c in stroke_coords], label=label)


class TestDedupe:
    def test_removes_consecutive_duplicates_keeping_earliest(self):
        s = Stroke([TouchPoint(0, 0, 0), TouchPoint(0, 0, 16), TouchPoint(1, 0, 33)])
        out = dedupe_stroke(s)
        assert [(p.x, p.y, p.t) for p in out.points] == [(0, 0, 0), (1, 0, 33)]

    def test_no_duplicates_unchanged(self):
        s = stroke_from([(0, 0), (1, 1), (2, 0)])
        assert dedupe_stroke(s).points == s.points

    def test_all_identical_collapses_to_one(self):
        s = Stroke([TouchPoint(2, 3, t) for t in (0, 16, 32)])
        out = dedupe_stroke(s)
        assert len(out) == 1
        assert out.points[0].t == 0


class TestPolar:
    def test_positive_x_axis(self):
        vecs = polar.to_polar_vectors(stroke_from([(0, 0), (1, 0)]))
        assert vecs[0, 0] == pytest.approx(0.0)
        assert vecs[0, 1] == pytest.approx(1.0)

    def test_screen_up_is_plus_half_pi(self):
        # moving up on screen means y decreases
        vecs = polar.to_polar_vectors(stroke_from([(0, 0), (0, -1)]))
        assert vecs[0, 0] == pytest.approx(math.pi / 2)
        assert vecs[0, 1] == pytest.approx(1.0)

    def test_down_right_closed_form(self):
        vecs = polar.to_polar_vectors(stroke_from([(0, 0), (3, 4)]))
        assert vecs[0, 1] == pytest.approx(5.0)
        assert vecs[0, 0] == pytest.approx(math.atan2(-4, 3))
        assert vecs[0, 0] == pytest.approx(-0.9273, abs=1e-4)

    def test_single_point_is_degenerate(self):
        with pytest.raises(DegenerateStrokeError):
            polar.to_polar_vectors(Stroke([TouchPoint(0, 0, 0)]))

    @given(
        st.lists(
            st.tuples(st.floats(-300, 300), st.floats(-300, 300)),
            min_size=2,
            max_size=40,
            unique=True,
        )
    )
    def test_count_law(self, coords):
        stroke = dedupe_stroke(stroke_from(coords))
        if len(stroke) < 2:
            return
        vecs = polar.to_polar_vectors(stroke)
        assert len(vecs) == len(stroke) - 1

    @pytest.mark.parametrize("scale", [2.0, 0.5, 8.0])
    def test_power_of_two_scaling_exact(self, scale):
        coords = [(0.0, 0.0), (3.0, 4.0), (10.0, -2.0), (7.5, 6.25)]
        base = polar.to_polar_vectors(stroke_from(coords))
        scaled = polar.to_polar_vectors(
            stroke_from([(x * scale, y * scale) for x, y in coords])
        )
        np.testing.assert_array_equal(scaled[:, 0], base[:, 0])
        np.testing.assert_array_equal(scaled[:, 1], base[:, 1] * scale)


class TestPadding:
    def test_pad_short_sequence(self):
        vecs = np.ones((10, 2))
        seq = polar.pad_or_truncate(vecs)
        assert seq.true_length == 10
        assert seq.vectors.shape == (130, 2)
        assert (seq.vectors[10:] == 0).all()

    def test_exact_length_unchanged(self):
        vecs = np.ones((130, 2))
        seq = polar.pad_or_truncate(vecs)
        assert seq.true_length == 130
        np.testing.assert_array_equal(seq.vectors, vecs)

    def test_truncation_warns_and_keeps_head(self):
        vecs = np.arange(280, dtype=float).reshape(140, 2)
        with pytest.warns(UserWarning, match="truncated"):
            seq = polar.pad_or_truncate(vecs)
        assert seq.true_length == 130
        np.testing.assert_array_equal(seq.vectors, vecs[:130])


class TestLongestStroke:
    def test_single_stroke(self):
        g = glyph_from([(0, 0), (10, 0)])
        assert longest_stroke(g) is g.strokes[0]

    def test_strictly_longer_wins(self):
        g = glyph_from([(0, 0), (40, 0)], [(0, 0), (220, 0)])
        assert longest_stroke(g) is g.strokes[1]

    def test_tie_goes_to_first_drawn(self):
        # mirrored strokes have bit-identical arclengths
        coords = [(0.0, 0.0), (7.0, 3.0), (12.0, -4.0)]
        mirrored = [(-x, y) for x, y in coords]
        g = glyph_from(coords, mirrored)
        assert arclength(g.strokes[0]) == arclength(g.strokes[1])
        assert longest_stroke(g) is g.strokes[0]


class TestRasterize:
    def test_single_point_renders_centered_dot(self):
        g = glyph_from([(55.0, 90.0)])
        img = raster.rasterize(g)
        assert img.shape == (28, 28)
        assert img.max() > 0
        ys, xs = np.nonzero(img)
        weights = img[ys, xs]
        com_x = (xs * weights).sum() / weights.sum()
        com_y = (ys * weights).sum() / weights.sum()
        assert abs(com_x - 14.0) <= 0.5
        assert abs(com_y - 14.0) <= 0.5

    def test_vertical_line_fills_centered_column(self):
        g = glyph_from([(50.0, 10.0), (50.0, 60.0), (50.0, 110.0)])
        img = raster.rasterize(g)
        ys, xs = np.nonzero(img)
        assert ys.max() - ys.min() >= 19
        assert ys.max() - ys.min() <= 24
        assert xs.max() - xs.min() <= 4
        assert abs((xs.min() + xs.max()) / 2 - 14) <= 1.5

    def test_output_contract(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            pts = rng.uniform(0, 300, size=(6, 2))
            img = raster.rasterize(glyph_from([tuple(p) for p in pts]))
            assert img.shape == (28, 28)
            assert img.min() >= 0.0 and img.max() <= 1.0
            assert img.max() > 0  # nonempty glyph leaves ink

    def test_translation_invariance(self):
        coords = [(10.0, 20.0), (60.0, 80.0), (110.0, 30.0)]
        a = raster.rasterize(glyph_from(coords))
        b = raster.rasterize(glyph_from([(x + 37.5, y - 12.25) for x, y in coords]))
        np.testing.assert_allclose(a, b, atol=1e-6)

    def test_uniform_scale_invariance(self):
        coords = [(10.0, 20.0), (60.0, 80.0), (110.0, 30.0), (95.0, 105.0)]
        a = raster.rasterize(glyph_from(coords))
        b = raster.rasterize(glyph_from([(x * 2.0, y * 2.0) for x, y in coords]))
        np.testing.assert_allclose(a, b, atol=1e-6)

    def test_idempotent_after_normalization(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            pts = rng.uniform(0, 250, size=(5, 2))
            g = glyph_from([tuple(p) for p in pts])
            normalized = raster.normalize_glyph(g)
            np.testing.assert_allclose(
                raster.rasterize(g), raster.rasterize(normalized), atol=1e-6
            )


class TestCompletionPrefix:
    def test_fraction_one_is_identity(self):
        g = glyph_from([(0, 0), (10, 10), (20, 0)], [(5, 5), (6, 6)])
        out = completion_prefix(g, 1.0)
        assert [len(s) for s in out.strokes] == [3, 2]
        assert [(p.x, p.y) for s in out.strokes for p in s.points] == [
            (p.x, p.y) for s in g.strokes for p in s.points
        ]

    def test_fraction_zero_is_first_point(self):
        g = glyph_from([(0, 0), (10, 10), (20, 0)], [(5, 5), (6, 6)])
        out = completion_prefix(g, 0.0)
        assert len(out.strokes) == 1
        assert len(out.strokes[0]) == 1
        assert (out.strokes[0].points[0].x, out.strokes[0].points[0].y) == (0, 0)

    def test_line_bisection(self):
        g = glyph_from([(float(x), 0.0) for x in range(0, 101, 10)])
        out = completion_prefix(g, 0.5)
        total = sum(arclength(s) for s in out.strokes)
        assert abs(total - 50.0) <= 1.0

    def test_monotone_prefixes(self):
        g = glyph_from([(0, 0), (30, 40), (60, 0)], [(0, 50), (80, 50)])
        sizes = []
        for f in np.linspace(0, 1, 11):
            out = completion_prefix(g, float(f))
            sizes.append(sum(len(s) for s in out.strokes))
        assert sizes == sorted(sizes)

    def test_prefix_crosses_stroke_boundary(self):
        g = glyph_from([(0, 0), (10, 0)], [(0, 10), (10, 10)])
        out = completion_prefix(g, 0.75)
        assert len(out.strokes) == 2


class TestFeatures:
    def test_polar_input_padding_stays_zero(self):
        seq = polar.to_polar_sequence(stroke_from([(0, 0), (10, 0), (20, 5)]))
        norm = Normalization(length_mean=5.0, length_std=2.0)
        x = polar_input(seq, "both", norm)
        assert x.shape == (130, 2)
        assert (x[seq.true_length :] == 0).all()
        assert x[0, 0] == pytest.approx(0.0)  # angle 0 along +x
        assert x[0, 1] == pytest.approx((10 - 5) / 2)

    def test_mode_channels(self):
        seq = polar.to_polar_sequence(stroke_from([(0, 0), (0, -3)]))
        norm = Normalization()
        assert polar_input(seq, "angle", norm).shape == (130, 1)
        assert polar_input(seq, "distance", norm).shape == (130, 1)
        assert polar_input(seq, "angle", norm)[0, 0] == pytest.approx(0.5)  # (pi/2)/pi

    def test_fit_normalization(self):
        glyphs = [
            glyph_from([(0, 0), (3, 4)], label=1),
            glyph_from([(0, 0), (6, 8)], label=1),
        ]
        norm = fit_normalization(glyphs)
        assert norm.length_mean == pytest.approx(7.5)
        assert norm.length_std == pytest.approx(2.5)
        assert norm.class_median_arclength[1] == pytest.approx(7.5)

    def test_preprocessor_degenerate_handling(self):
        g = glyph_from([(5.0, 5.0)])
        pre = Preprocessor("polar1d", "both")
        with pytest.raises(DegenerateStrokeError):
            pre.glyph_to_input(g)
        x = pre.glyph_to_input(g, degenerate_ok=True)
        assert x.shape == (130, 2)
        assert (x == 0).all()

    def test_preprocessor_bitmap(self):
        g = glyph_from([(0, 0), (10, 10), (20, 0)])
        x = Preprocessor("bitmap2d").glyph_to_input(g)
        assert x.shape == (28, 28, 1)
        assert x.dtype == np.float32
