"""Proportional follow controllers with deadbands.

Behind mode regulates distance with forward speed and pixel deviation with
yaw; accompany (left/right) mode regulates only along-track position from
pixel deviation, holding the base heading and the side-facing camera.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import angle_diff
from .perception import TrackingObservation
from .sim import BaseCommand, ZERO_COMMAND


@dataclass(frozen=True)
class FollowParams:
    target_distance: float = 1.2   # m (behind); side modes use 0.5 from the switch table
    dist_tol: float = 0.15         # m deadband on distance
    dev_tol_px: float = 30.0       # px deadband on deviation
    k_v: float = 0.8               # (m/s) per m of distance error
    k_w: float = 0.15              # (deg/s) per px of deviation
    k_along: float = 0.0013        # (m/s) per px of deviation, accompany mode
    lost_policy: str = "stop"      # stop | hold_last
    face_nudge_rate: float = 10.0  # deg/s camera assist pan in behind mode

    def __post_init__(self):
        if self.dist_tol <= 0 or self.dev_tol_px <= 0:
            raise ValueError("tolerances must be positive")
        if min(self.k_v, self.k_w, self.k_along) < 0:
            raise ValueError("gains must be >= 0")
        if self.lost_policy not in ("stop", "hold_last"):
            raise ValueError(f"unknown lost_policy: {self.lost_policy!r}")


def _clip(x: float, cap: float) -> float:
    return max(-cap, min(cap, x))


def behind_control(obs: TrackingObservation, params: FollowParams,
                   v_cap: float = 0.3, w_cap: float = 60.0,
                   face_angle: float = 0.0) -> BaseCommand:
    """Behind-follow: distance drives v, deviation drives w.

    Positive deviation (target right of center) turns the base clockwise.
    When the deviation exceeds twice the deadband the camera also pans
    toward the target; inside the deadband it pans back to center.
    """
    if not obs.in_frame:
        return ZERO_COMMAND

    v = 0.0
    err_d = obs.distance - params.target_distance
    if abs(err_d) > params.dist_tol:
        v = _clip(params.k_v * err_d, v_cap)

    w = 0.0
    if abs(obs.deviation_px) > params.dev_tol_px:
        w = _clip(-params.k_w * obs.deviation_px, w_cap)

    face_rate = 0.0
    face_err = angle_diff(face_angle, 0.0)
    if abs(obs.deviation_px) > 2.0 * params.dev_tol_px:
        face_rate = -params.face_nudge_rate if obs.deviation_px > 0 else params.face_nudge_rate
    elif abs(obs.deviation_px) <= params.dev_tol_px and abs(face_err) > 0.5:
        face_rate = _clip(-2.0 * face_err, params.face_nudge_rate)

    return BaseCommand(v=v, w=w, face_rate=face_rate)


def accompany_control(obs: TrackingObservation, side: str, params: FollowParams,
                      v_cap: float = 0.3) -> BaseCommand:
    """Accompany-follow: deviation drives along-track v; heading is held.

    In left mode the camera faces the robot's right, so a positive
    deviation means the user drifted toward the rear (move backward); in
    right mode the camera faces left and positive deviation means the
    user is ahead (move forward).
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, got {side!r}")
    if not obs.in_frame:
        return ZERO_COMMAND
    if abs(obs.deviation_px) <= params.dev_tol_px:
        return ZERO_COMMAND
    sign = -1.0 if side == "left" else 1.0
    return BaseCommand(v=_clip(sign * params.k_along * obs.deviation_px, v_cap))


LOST_FAILURE_TICKS = 3  # perception ticks of staleness that mark a follow failure


def lost_target(last_cmd: BaseCommand, params: FollowParams,
                lost_for_s: float) -> BaseCommand:
    """Command while the target is out of frame, per the configured policy."""
    if params.lost_policy == "hold_last" and lost_for_s <= 1.0:
        return last_cmd
    return ZERO_COMMAND
