"""Geometry primitives, checked against brute-force oracles."""
import math

import pytest
from hypothesis import given, strategies as st

from followbot.geometry import (Pose2, angle_diff, dist_point_to_rect,
                                dist_point_to_segment, normalize_angle,
                                rotate_xy)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
angles = st.floats(min_value=-1080.0, max_value=1080.0, allow_nan=False)


class TestAngles:
    @given(angles)
    def test_normalize_range(self, a):
        n = normalize_angle(a)
        assert 0.0 <= n < 360.0

    @given(angles)
    def test_normalize_preserves_direction(self, a):
        n = normalize_angle(a)
        assert math.isclose(math.cos(math.radians(n)), math.cos(math.radians(a)),
                            abs_tol=1e-9)
        assert math.isclose(math.sin(math.radians(n)), math.sin(math.radians(a)),
                            abs_tol=1e-9)

    def test_normalize_examples(self):
        assert normalize_angle(360.0) == 0.0
        assert normalize_angle(-90.0) == 270.0
        assert normalize_angle(-1e-12) < 360.0

    @given(angles, angles)
    def test_angle_diff_range_and_meaning(self, a, b):
        d = angle_diff(a, b)
        assert -180.0 < d <= 180.0
        assert math.isclose(math.cos(math.radians(b + d)),
                            math.cos(math.radians(a)), abs_tol=1e-9)
        assert math.isclose(math.sin(math.radians(b + d)),
                            math.sin(math.radians(a)), abs_tol=1e-9)

    def test_angle_diff_examples(self):
        assert angle_diff(10.0, 350.0) == pytest.approx(20.0)
        assert angle_diff(350.0, 10.0) == pytest.approx(-20.0)
        assert angle_diff(180.0, 0.0) == pytest.approx(180.0)
        assert angle_diff(0.0, 180.0) == pytest.approx(180.0)


class TestPose:
    @given(finite, finite, angles, st.floats(-100, 100), st.floats(-100, 100))
    def test_transform_round_trip(self, x, y, th, px, py):
        pose = Pose2(x, y, th)
        wx, wy = pose.transform_point(px, py)
        bx, by = pose.inverse_transform_point(wx, wy)
        assert math.isclose(bx, px, abs_tol=1e-6 * (1 + abs(px)))
        assert math.isclose(by, py, abs_tol=1e-6 * (1 + abs(py)))

    @given(finite, finite, angles, st.floats(-100, 100), st.floats(-100, 100),
           angles)
    def test_frame_round_trip(self, x, y, th, ox, oy, oth):
        pose = Pose2(x, y, th)
        other = Pose2(ox, oy, oth)
        back = pose.from_frame(pose.to_frame(other))
        assert math.isclose(back.x, other.x, abs_tol=1e-6 * (1 + abs(other.x)))
        assert math.isclose(back.y, other.y, abs_tol=1e-6 * (1 + abs(other.y)))
        assert abs(angle_diff(back.theta, other.theta)) < 1e-6

    def test_forward_moves_along_heading(self):
        p = Pose2(1.0, 2.0, 90.0).forward(3.0)
        assert p.x == pytest.approx(1.0)
        assert p.y == pytest.approx(5.0)

    def test_bearing_examples(self):
        p = Pose2(0.0, 0.0, 0.0)
        assert p.bearing_to(1.0, 1.0) == pytest.approx(45.0)
        assert p.bearing_to(1.0, -1.0) == pytest.approx(-45.0)
        assert Pose2(0, 0, 90).bearing_to(0.0, 5.0) == pytest.approx(0.0)

    @given(angles, st.floats(0.01, 10.0))
    def test_rotate_preserves_length(self, deg, r):
        x, y = rotate_xy(r, 0.0, deg)
        assert math.hypot(x, y) == pytest.approx(r, rel=1e-9)


def _rect_dist_brute(x, y, hl, hw, n=400):
    """Oracle: dense sampling of the rectangle boundary and interior test."""
    if abs(x) <= hl and abs(y) <= hw:
        return 0.0
    best = float("inf")
    for i in range(n + 1):
        t = -hl + 2 * hl * i / n
        best = min(best, math.hypot(x - t, y - hw), math.hypot(x - t, y + hw))
        s = -hw + 2 * hw * i / n
        best = min(best, math.hypot(x - hl, y - s), math.hypot(x + hl, y - s))
    return best


class TestDistances:
    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_rect_distance_matches_brute_force(self, x, y):
        exact = dist_point_to_rect(x, y, 0.6, 0.35)
        brute = _rect_dist_brute(x, y, 0.6, 0.35)
        assert exact == pytest.approx(brute, abs=0.01)

    def test_rect_inside_is_zero(self):
        assert dist_point_to_rect(0.1, -0.2, 0.6, 0.35) == 0.0

    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_segment_distance_matches_sampling(self, px, py):
        ax, ay, bx, by = -1.0, -2.0, 3.0, 1.0
        exact = dist_point_to_segment(px, py, ax, ay, bx, by)
        brute = min(math.hypot(px - (ax + t / 1000 * (bx - ax)),
                               py - (ay + t / 1000 * (by - ay)))
                    for t in range(1001))
        assert exact == pytest.approx(brute, abs=0.01)

    def test_degenerate_segment(self):
        assert dist_point_to_segment(3.0, 4.0, 0, 0, 0, 0) == pytest.approx(5.0)
