"""Deterministic fixed-timestep 2D world model.

The world holds a differential-drive robot with a pan camera and an
abstracted 3-scalar arm, the wheelchair user on a scripted path, optional
background pedestrians, and movable chair obstacles.

Integration order per step: rotate the base by w*dt, then translate by
v*dt along the new heading.  The arm telescopes out of the right side of
the base (like a side-mounted telescoping arm), so the arm tip sits at
``base + (mount + extension)`` along heading-90deg.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .geometry import Pose2, normalize_angle

DEFAULT_DT = 0.05

LIFT_MIN, LIFT_MAX = 0.0, 1.1
ARM_MIN, ARM_MAX = 0.0, 0.5
ARM_MOUNT_OFFSET = 0.1   # m from base center to retracted arm tip
GRASP_REACH = 0.1        # m from arm tip to a chair edge for attachment
FACE_RATE_CAP = 90.0     # deg/s camera pan limit


@dataclass(frozen=True)
class BaseCommand:
    """Velocity command: forward speed, yaw rate, and camera pan rate."""

    v: float = 0.0          # m/s, forward positive
    w: float = 0.0          # deg/s, CCW positive
    face_rate: float = 0.0  # deg/s camera pan, CCW positive

    def saturated(self, v_cap: float, w_cap: float) -> "BaseCommand":
        return BaseCommand(
            v=max(-v_cap, min(v_cap, self.v)),
            w=max(-w_cap, min(w_cap, self.w)),
            face_rate=max(-FACE_RATE_CAP, min(FACE_RATE_CAP, self.face_rate)),
        )


ZERO_COMMAND = BaseCommand()


@dataclass(frozen=True)
class RobotState:
    base: Pose2 = field(default_factory=Pose2)
    face_angle: float = 0.0      # deg CCW relative to base heading, [0, 360)
    lift: float = 0.0            # m, [0, 1.1]
    arm_extension: float = 0.0   # m, [0, 0.5]
    wrist_angle: float = 0.0     # deg
    gripper: str = "open"        # open | closed
    grasped: Optional[str] = None
    grasp_offset: Optional[tuple[float, float]] = None  # chair center in base frame
    v_cap: float = 0.3
    w_cap: float = 60.0

    def __post_init__(self):
        object.__setattr__(self, "face_angle", normalize_angle(self.face_angle))
        if self.grasped is not None and self.gripper != "closed":
            raise ValueError("grasped object requires a closed gripper")

    def arm_tip(self) -> tuple[float, float]:
        """World position of the arm tip (extends to the robot's right)."""
        reach = ARM_MOUNT_OFFSET + self.arm_extension
        return self.base.transform_point(0.0, -reach)

    def camera_pose(self) -> Pose2:
        return Pose2(self.base.x, self.base.y, self.base.theta + self.face_angle)


@dataclass(frozen=True)
class WheelchairAgent:
    pose: Pose2 = field(default_factory=Pose2)
    speed: float = 0.0
    path: tuple[tuple[float, float], ...] = ()
    seated_height: float = 1.3
    radius: float = 0.3
    footprint: tuple[float, float] = (1.2, 0.7)  # length x width, body frame
    progress: float = 0.0  # arc length travelled along path

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("wheelchair speed must be >= 0")


@dataclass(frozen=True)
class PersonAgent:
    pose: Pose2 = field(default_factory=Pose2)
    speed: float = 0.0
    path: tuple[tuple[float, float], ...] = ()
    standing_height: float = 1.7
    radius: float = 0.25
    progress: float = 0.0


@dataclass(frozen=True)
class Chair:
    id: str
    pose: Pose2
    radius: float = 0.25


@dataclass(frozen=True)
class WorldState:
    time: float = 0.0
    robot: RobotState = field(default_factory=RobotState)
    wheelchair: WheelchairAgent = field(default_factory=WheelchairAgent)
    persons: tuple[PersonAgent, ...] = ()
    chairs: tuple[Chair, ...] = ()
    rng_seed: int = 0


@dataclass(frozen=True)
class ManipulationReport:
    clamped: bool = False
    attached: Optional[str] = None
    released: Optional[str] = None


def _pose_along_path(path: tuple[tuple[float, float], ...], progress: float,
                     fallback: Pose2) -> Pose2:
    """Pose at arc length ``progress`` along a polyline; heading follows the segment."""
    if len(path) < 2:
        return fallback
    remaining = progress
    for (ax, ay), (bx, by) in zip(path, path[1:]):
        seg = math.hypot(bx - ax, by - ay)
        heading = math.degrees(math.atan2(by - ay, bx - ax))
        if remaining <= seg or seg == 0.0:
            if seg == 0.0:
                continue
            t = remaining / seg
            return Pose2(ax + t * (bx - ax), ay + t * (by - ay), heading)
        remaining -= seg
    # past the end: park at the final waypoint, keep last heading
    (ax, ay), (bx, by) = path[-2], path[-1]
    heading = math.degrees(math.atan2(by - ay, bx - ax))
    return Pose2(bx, by, heading)


def path_length(path: tuple[tuple[float, float], ...]) -> float:
    return sum(math.hypot(bx - ax, by - ay)
               for (ax, ay), (bx, by) in zip(path, path[1:]))


def _advance_wheelchair(w: WheelchairAgent, dt: float) -> WheelchairAgent:
    if w.speed == 0.0 or len(w.path) < 2:
        return w
    progress = min(w.progress + w.speed * dt, path_length(w.path))
    return replace(w, progress=progress,
                   pose=_pose_along_path(w.path, progress, w.pose))


def _advance_person(p: PersonAgent, dt: float) -> PersonAgent:
    if p.speed == 0.0 or len(p.path) < 2:
        return p
    progress = min(p.progress + p.speed * dt, path_length(p.path))
    return replace(p, progress=progress,
                   pose=_pose_along_path(p.path, progress, p.pose))


def step(world: WorldState, cmd: BaseCommand, dt: float) -> WorldState:
    """Advance the world by one fixed timestep under an already-saturated command."""
    if dt == 0.0:
        return world

    robot = world.robot
    base = robot.base.rotated(cmd.w * dt).forward(cmd.v * dt)
    face = normalize_angle(robot.face_angle + cmd.face_rate * dt)
    robot = replace(robot, base=base, face_angle=face)

    chairs = world.chairs
    if robot.grasped is not None and robot.grasp_offset is not None:
        gx, gy = robot.grasp_offset
        cxw, cyw = base.transform_point(gx, gy)
        chairs = tuple(
            replace(c, pose=Pose2(cxw, cyw, c.pose.theta)) if c.id == robot.grasped else c
            for c in chairs
        )

    return replace(
        world,
        time=world.time + dt,
        robot=robot,
        wheelchair=_advance_wheelchair(world.wheelchair, dt),
        persons=tuple(_advance_person(p, dt) for p in world.persons),
        chairs=chairs,
    )


def _clamp(value: float, lo: float, hi: float) -> tuple[float, bool]:
    if value < lo:
        return lo, True
    if value > hi:
        return hi, True
    return value, False


def apply_manipulation(world: WorldState, joint: str,
                       delta: float = 0.0) -> tuple[WorldState, ManipulationReport]:
    """Apply an arm/gripper action.

    ``joint`` is one of lift / extend / wrist / gripper_open / gripper_close.
    Out-of-range deltas clamp silently and set the clamped flag.
    """
    if not math.isfinite(delta):
        raise ValueError("manipulation delta must be finite")
    robot = world.robot
    report = ManipulationReport()

    if joint == "lift":
        lift, clamped = _clamp(robot.lift + delta, LIFT_MIN, LIFT_MAX)
        robot = replace(robot, lift=lift)
        report = ManipulationReport(clamped=clamped)
    elif joint == "extend":
        ext, clamped = _clamp(robot.arm_extension + delta, ARM_MIN, ARM_MAX)
        robot = replace(robot, arm_extension=ext)
        report = ManipulationReport(clamped=clamped)
    elif joint == "wrist":
        robot = replace(robot, wrist_angle=robot.wrist_angle + delta)
    elif joint == "gripper_open":
        released = robot.grasped
        robot = replace(robot, gripper="open", grasped=None, grasp_offset=None)
        report = ManipulationReport(released=released)
    elif joint == "gripper_close":
        tipx, tipy = robot.arm_tip()
        best = None
        best_gap = GRASP_REACH
        for chair in world.chairs:
            gap = math.hypot(chair.pose.x - tipx, chair.pose.y - tipy) - chair.radius
            if gap <= best_gap:
                best, best_gap = chair, gap
        if best is not None:
            offset = robot.base.inverse_transform_point(best.pose.x, best.pose.y)
            robot = replace(robot, gripper="closed", grasped=best.id,
                            grasp_offset=offset)
            report = ManipulationReport(attached=best.id)
        else:
            robot = replace(robot, gripper="closed")
    else:
        raise ValueError(f"unknown manipulation joint: {joint!r}")

    return replace(world, robot=robot), report
