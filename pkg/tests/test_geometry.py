"""Spline interpolation and arclength oracles."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from digitink import geometry


def test_two_points_degenerate_to_chord():
    pts = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert geometry.path_arclength(pts) == pytest.approx(5.0, abs=1e-9)


def test_three_collinear_points_reproduce_the_line():
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    end_to_end = np.linalg.norm(pts[-1] - pts[0])
    assert geometry.path_arclength(pts) == pytest.approx(end_to_end, rel=1e-6)


def test_single_point_has_zero_length():
    assert geometry.path_arclength(np.array([[5.0, 5.0]])) == 0.0


def test_spline_passes_through_every_touch_point():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 100, size=(7, 2))
    samples = geometry.sample_spline(pts, 10)
    for p in pts:
        dist = np.linalg.norm(samples - p, axis=1).min()
        assert dist < 1e-9


def test_minimum_sampling_density():
    pts = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]])
    samples = geometry.sample_spline(pts, 8)
    # 2 segments x (1 knot + 8 interior) + final knot
    assert len(samples) == 2 * 9 + 1


coords = st.floats(-200, 200)


@given(st.lists(st.tuples(coords, coords), min_size=2, max_size=8, unique=True))
def test_arclength_at_least_chord_sum(points):
    pts = np.array(points, dtype=np.float64)
    if (np.linalg.norm(np.diff(pts, axis=0), axis=1) == 0).any():
        return  # consecutive duplicates are the dedupe step's job
    chord = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
    assert geometry.path_arclength(pts) >= chord - 1e-9


def test_arclength_profile_monotone_and_consistent():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 50, size=(6, 2))
    prof = geometry.arclength_profile(pts)
    assert prof[0] == 0.0
    assert (np.diff(prof) >= 0).all()
    assert prof[-1] == pytest.approx(geometry.path_arclength(pts))
