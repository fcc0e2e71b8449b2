"""Planar geometry primitives shared by the simulator and controllers.

Angles are degrees, counter-clockwise positive, normalized to [0, 360).
"""
from __future__ import annotations

import math
from dataclasses import dataclass


def normalize_angle(deg: float) -> float:
    """Wrap an angle in degrees into [0, 360)."""
    a = math.fmod(deg, 360.0)
    if a < 0.0:
        a += 360.0
    # fmod can return exactly 360.0 after the correction for tiny negatives
    if a >= 360.0:
        a -= 360.0
    return a


def angle_diff(a: float, b: float) -> float:
    """Smallest signed difference a - b, in (-180, 180]."""
    d = math.fmod(a - b, 360.0)
    if d > 180.0:
        d -= 360.0
    elif d <= -180.0:
        d += 360.0
    return d


def rotate_xy(x: float, y: float, deg: float) -> tuple[float, float]:
    r = math.radians(deg)
    c, s = math.cos(r), math.sin(r)
    return c * x - s * y, s * x + c * y


@dataclass(frozen=True)
class Pose2:
    """Planar pose: position in meters, heading in degrees CCW in [0, 360)."""

    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def forward(self, dist: float) -> "Pose2":
        r = math.radians(self.theta)
        return Pose2(self.x + dist * math.cos(r), self.y + dist * math.sin(r), self.theta)

    def rotated(self, dtheta: float) -> "Pose2":
        return Pose2(self.x, self.y, self.theta + dtheta)

    def transform_point(self, px: float, py: float) -> tuple[float, float]:
        """Map a point from this pose's local frame to the world frame."""
        wx, wy = rotate_xy(px, py, self.theta)
        return self.x + wx, self.y + wy

    def inverse_transform_point(self, wx: float, wy: float) -> tuple[float, float]:
        """Map a world point into this pose's local frame."""
        return rotate_xy(wx - self.x, wy - self.y, -self.theta)

    def to_frame(self, other: "Pose2") -> "Pose2":
        """Express ``other`` (a world pose) in this pose's local frame."""
        lx, ly = self.inverse_transform_point(other.x, other.y)
        return Pose2(lx, ly, other.theta - self.theta)

    def from_frame(self, local: "Pose2") -> "Pose2":
        """Map a pose given in this pose's local frame back to the world."""
        wx, wy = self.transform_point(local.x, local.y)
        return Pose2(wx, wy, local.theta + self.theta)

    def distance_to(self, other: "Pose2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def bearing_to(self, wx: float, wy: float) -> float:
        """Signed CCW bearing of a world point relative to this heading."""
        return angle_diff(math.degrees(math.atan2(wy - self.y, wx - self.x)), self.theta)


def dist_point_to_rect(x: float, y: float, half_len: float, half_wid: float) -> float:
    """Distance from a point to an origin-centered axis-aligned rectangle.

    Zero when the point lies inside the rectangle.
    """
    dx = max(abs(x) - half_len, 0.0)
    dy = max(abs(y) - half_wid, 0.0)
    return math.hypot(dx, dy)


def dist_point_to_segment(px: float, py: float, ax: float, ay: float,
                          bx: float, by: float) -> float:
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / L2))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))
