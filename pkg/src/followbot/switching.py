"""Follow-mode switching: target table, midpoint trajectories, collision
checks, and a waypoint-tracking executor.

All planning happens in the wheelchair's body frame, snapshotted at plan
time: +x is the wheelchair heading and the orbit angle is measured CCW
from it (90 = left, 180 = behind, 270 = right).

A one-segment side-to-side move would drive straight through the
wheelchair, so elementary transitions route through a rear-diagonal
midpoint (orbit 135 or 225 deg at 1.1 m); left<->right concatenates two
elementary plans through the behind target.

When the planner is given the wheelchair footprint it stands the side
approach points off far enough that a robot of the given radius clears
the inflated footprint; the offset stays inside the 5 cm pose tolerance
of the switch targets.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .geometry import Pose2, angle_diff, dist_point_to_rect
from .sim import BaseCommand, WorldState, ZERO_COMMAND


class FollowMode(enum.Enum):
    BEHIND = "behind"
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class SwitchTarget:
    distance: float      # m from wheelchair center
    orbit_angle: float   # deg CCW from wheelchair heading
    base_angle: float    # deg, robot heading minus wheelchair heading
    face_angle: float    # deg, camera CCW from robot heading


SWITCH_TARGETS: dict[FollowMode, SwitchTarget] = {
    FollowMode.LEFT: SwitchTarget(0.5, 90.0, 0.0, 270.0),
    FollowMode.BEHIND: SwitchTarget(1.2, 180.0, 0.0, 0.0),
    FollowMode.RIGHT: SwitchTarget(0.5, 270.0, 0.0, 90.0),
}

MIDPOINT_DISTANCE = 1.1
MIDPOINT_ORBIT = {"left_side": 135.0, "right_side": 225.0}

DEFAULT_ROBOT_RADIUS = 0.17
APPROACH_MARGIN = 0.025


def switch_targets(mode: FollowMode) -> SwitchTarget:
    return SWITCH_TARGETS[mode]


def _polar(distance: float, orbit_deg: float) -> tuple[float, float]:
    r = math.radians(orbit_deg)
    return distance * math.cos(r), distance * math.sin(r)


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    heading: float  # deg in the wheelchair frame, toward the next waypoint


@dataclass(frozen=True)
class SwitchPlan:
    waypoints: tuple[Waypoint, ...]
    from_mode: FollowMode
    to_mode: FollowMode
    final_base_angle: float = 0.0
    final_face_angle: float = 0.0

    @property
    def segments(self) -> list[tuple[Waypoint, Waypoint]]:
        return list(zip(self.waypoints, self.waypoints[1:]))


def side_approach_distance(target: SwitchTarget,
                           footprint: Optional[tuple[float, float]],
                           robot_radius: float = DEFAULT_ROBOT_RADIUS,
                           margin: float = APPROACH_MARGIN) -> float:
    """Side-target standoff: clear the inflated footprint, keep the table
    distance whenever it already clears."""
    if footprint is None:
        return target.distance
    half_width = footprint[1] / 2.0
    return max(target.distance, half_width + robot_radius + margin)


def _route_points(frm: FollowMode, to: FollowMode,
                  footprint: Optional[tuple[float, float]],
                  robot_radius: float) -> list[tuple[float, float]]:
    def target_point(mode: FollowMode) -> tuple[float, float]:
        t = SWITCH_TARGETS[mode]
        dist = t.distance
        if mode in (FollowMode.LEFT, FollowMode.RIGHT):
            dist = side_approach_distance(t, footprint, robot_radius)
        return _polar(dist, t.orbit_angle)

    mid_left = _polar(MIDPOINT_DISTANCE, MIDPOINT_ORBIT["left_side"])
    mid_right = _polar(MIDPOINT_DISTANCE, MIDPOINT_ORBIT["right_side"])
    B, L, R = FollowMode.BEHIND, FollowMode.LEFT, FollowMode.RIGHT

    routes = {
        (L, B): [mid_left, target_point(B)],
        (B, L): [mid_left, target_point(L)],
        (R, B): [mid_right, target_point(B)],
        (B, R): [mid_right, target_point(R)],
        (L, R): [mid_left, target_point(B), mid_right, target_point(R)],
        (R, L): [mid_right, target_point(B), mid_left, target_point(L)],
    }
    return routes[(frm, to)]


def plan_switch(rel_pose: Pose2, frm: FollowMode, to: FollowMode,
                footprint: Optional[tuple[float, float]] = None,
                robot_radius: float = DEFAULT_ROBOT_RADIUS) -> SwitchPlan:
    """Plan the two-segment (or concatenated four-segment) switch trajectory.

    ``rel_pose`` is the robot pose in the wheelchair frame; it becomes the
    first waypoint.  ``footprint`` (length, width), when given, enables the
    side-approach standoff.
    """
    if not all(math.isfinite(v) for v in (rel_pose.x, rel_pose.y, rel_pose.theta)):
        raise ValueError("rel_pose must be finite")
    target = SWITCH_TARGETS[to]
    if frm == to:
        return SwitchPlan((), frm, to, target.base_angle, target.face_angle)

    points = [(rel_pose.x, rel_pose.y)]
    points += _route_points(frm, to, footprint, robot_radius)

    waypoints = []
    for i, (x, y) in enumerate(points):
        if i + 1 < len(points):
            nx, ny = points[i + 1]
            heading = math.degrees(math.atan2(ny - y, nx - x))
        else:
            heading = target.base_angle
        waypoints.append(Waypoint(x, y, heading))
    return SwitchPlan(tuple(waypoints), frm, to,
                      target.base_angle, target.face_angle)


def check_collision(plan: SwitchPlan, footprint: tuple[float, float],
                    robot_radius: float = DEFAULT_ROBOT_RADIUS,
                    spacing: float = 0.01) -> bool:
    """True iff any point along the plan, sampled at <= ``spacing`` arc
    length, lies inside the wheelchair footprint inflated by the robot
    radius (rounded corners: distance-to-rectangle <= radius)."""
    half_len, half_wid = footprint[0] / 2.0, footprint[1] / 2.0
    for a, b in plan.segments:
        length = math.hypot(b.x - a.x, b.y - a.y)
        n = max(1, math.ceil(length / spacing))
        for i in range(n + 1):
            t = i / n
            px = a.x + t * (b.x - a.x)
            py = a.y + t * (b.y - a.y)
            if dist_point_to_rect(px, py, half_len, half_wid) <= robot_radius:
                return True
    return False


@dataclass(frozen=True)
class SwitchOutcome:
    event: str                       # complete | aborted
    displacement: float = 0.0        # wheelchair drift that caused an abort


ABORT_DRIFT = 0.3        # m of wheelchair motion from the plan-time snapshot
WAYPOINT_TOL = 0.02      # m, intermediate waypoints
FINAL_TOL = 0.008        # m, last waypoint
ANGLE_TOL = 1.0          # deg, terminal base/face alignment


@dataclass
class SwitchExecutor:
    """Tracks a SwitchPlan with rotate-to-face-then-drive waypoint following.

    Owns no world state: call ``update`` once per sim step; it returns the
    base command and, when finished, a SwitchOutcome.
    """

    plan: SwitchPlan
    snapshot: Pose2                  # wheelchair world pose at plan time
    speed: float = 0.2
    _index: int = 1                  # waypoint 0 is the start pose
    _phase: str = "drive"            # drive | align | pan
    done: bool = field(default=False)

    def update(self, world: WorldState) -> tuple[BaseCommand, Optional[SwitchOutcome]]:
        if self.done:
            return ZERO_COMMAND, None

        drift = world.wheelchair.pose.distance_to(self.snapshot)
        if drift > ABORT_DRIFT:
            self.done = True
            return ZERO_COMMAND, SwitchOutcome("aborted", displacement=drift)

        robot = world.robot
        if not self.plan.waypoints or self._index >= len(self.plan.waypoints):
            if not self.plan.waypoints:
                self.done = True
                return ZERO_COMMAND, SwitchOutcome("complete")
            return self._terminal(robot)

        wp = self.plan.waypoints[self._index]
        wx, wy = self.snapshot.transform_point(wp.x, wp.y)
        dist = math.hypot(wx - robot.base.x, wy - robot.base.y)
        is_final = self._index == len(self.plan.waypoints) - 1
        tol = FINAL_TOL if is_final else WAYPOINT_TOL

        if dist < tol:
            self._index += 1
            if self._index >= len(self.plan.waypoints):
                self._phase = "align"
            return ZERO_COMMAND, None

        heading_err = robot.base.bearing_to(wx, wy)
        w = _clip(3.0 * heading_err, robot.w_cap)
        v = 0.0
        if abs(heading_err) < 15.0 or dist < 0.05:
            if dist < 0.05:
                w = 0.0
            v = min(self.speed, max(0.02, 2.5 * dist), robot.v_cap)
        return BaseCommand(v=v, w=w), None

    def _terminal(self, robot) -> tuple[BaseCommand, Optional[SwitchOutcome]]:
        if self._phase == "align":
            target_heading = self.snapshot.theta + self.plan.final_base_angle
            err = angle_diff(target_heading, robot.base.theta)
            if abs(err) < ANGLE_TOL:
                self._phase = "pan"
            else:
                return BaseCommand(w=_clip(3.0 * err, robot.w_cap)), None
        if self._phase == "pan":
            err = angle_diff(self.plan.final_face_angle, robot.face_angle)
            if abs(err) < ANGLE_TOL:
                self.done = True
                return ZERO_COMMAND, SwitchOutcome("complete")
            return BaseCommand(face_rate=_clip(3.0 * err, 90.0)), None
        return ZERO_COMMAND, None


def _clip(x: float, cap: float) -> float:
    return max(-cap, min(cap, x))
