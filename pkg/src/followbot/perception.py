"""Simulated camera, detector, and wheelchair-user identification.

Pixel convention: image x grows to the right.  The bearing of an entity in
the camera frame is measured positive-to-the-right (clockwise when seen
from above), so a positive pixel deviation always means "target right of
image center".  The horizontal bearing->pixel mapping is linear in angle;
bounding-box sizes use the true pinhole focal constant
``f_px = image_width / (2 tan(hfov/2))``.

The camera mast blocks a fixed angular sector of the view (the occlusion
sector); detections whose bearing falls inside it are suppressed.  This
only matters in practice when following by the right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .sim import WorldState
from .geometry import Pose2


@dataclass(frozen=True)
class CameraModel:
    hfov: float = 62.0
    image_width: int = 640
    image_height: int = 480
    occlusion_sector: Optional[tuple[float, float]] = (18.0, 31.0)
    noise_px: float = 2.0
    miss_prob: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.hfov < 180.0):
            raise ValueError("hfov must be in (0, 180)")
        if self.occlusion_sector is not None:
            lo, hi = self.occlusion_sector
            half = self.hfov / 2.0
            if not (-half <= lo <= hi <= half):
                raise ValueError("occlusion_sector must lie within the FOV")

    @property
    def f_px(self) -> float:
        return self.image_width / (2.0 * math.tan(math.radians(self.hfov / 2.0)))

    def bearing_to_cx(self, bearing: float) -> float:
        """Linear angle->pixel mapping; positive bearing lands right of center."""
        half_w = self.image_width / 2.0
        return half_w + bearing / (self.hfov / 2.0) * half_w


@dataclass(frozen=True)
class Detection:
    cls: str                      # person | other
    cx: float
    cy: float
    w: float
    h: float
    depth: float
    source_id: str = ""           # test oracles only; controllers never read it

    @property
    def area(self) -> float:
        return self.w * self.h

    def estimated_height(self, f_px: float) -> float:
        return self.h * self.depth / f_px


@dataclass(frozen=True)
class TrackingObservation:
    deviation_px: float = 0.0
    distance: float = float("inf")
    in_frame: bool = False
    target_height_px: float = 0.0
    staleness: int = 0


def project(camera: CameraModel, camera_pose: Pose2, x: float, y: float,
            height: float, radius: float, source_id: str = "",
            cls: str = "person") -> Optional[Detection]:
    """Pinhole-style projection of a cylinder entity into the image.

    Returns None when the entity center is outside the FOV or inside the
    occlusion sector.
    """
    depth = math.hypot(x - camera_pose.x, y - camera_pose.y)
    if depth <= 1e-9:
        raise ValueError("entity coincides with the camera origin")
    # CCW bearing from geometry, negated into the rightward-positive image frame
    bearing = -camera_pose.bearing_to(x, y)
    half = camera.hfov / 2.0
    if abs(bearing) > half:
        return None
    if camera.occlusion_sector is not None:
        lo, hi = camera.occlusion_sector
        if lo <= bearing <= hi:
            return None
    cx = camera.bearing_to_cx(bearing)
    h_px = camera.f_px * height / depth
    w_px = camera.f_px * (2.0 * radius) / depth
    h_px = min(h_px, float(camera.image_height))
    w_px = min(w_px, float(camera.image_width))
    return Detection(cls=cls, cx=cx, cy=camera.image_height / 2.0,
                     w=w_px, h=h_px, depth=depth, source_id=source_id)


def detect(world: WorldState, camera: CameraModel,
           rng: Optional[np.random.Generator] = None) -> list[Detection]:
    """Project the wheelchair user and all pedestrians, noisy, sorted by area."""
    camera_pose = world.robot.camera_pose()
    raw: list[Detection] = []

    wc = world.wheelchair
    d = project(camera, camera_pose, wc.pose.x, wc.pose.y,
                wc.seated_height, wc.radius, source_id="wheelchair_user")
    if d is not None:
        raw.append(d)
    for i, p in enumerate(world.persons):
        d = project(camera, camera_pose, p.pose.x, p.pose.y,
                    p.standing_height, p.radius, source_id=f"person_{i}")
        if d is not None:
            raw.append(d)

    out: list[Detection] = []
    for d in raw:
        if rng is not None and camera.miss_prob > 0.0 and rng.random() < camera.miss_prob:
            continue
        if rng is not None and camera.noise_px > 0.0:
            n = rng.normal(0.0, camera.noise_px, size=3)
            d = Detection(cls=d.cls, cx=d.cx + n[0], cy=d.cy + n[1],
                          w=d.w, h=max(1.0, d.h + n[2]),
                          depth=d.depth, source_id=d.source_id)
        out.append(d)
    out.sort(key=lambda d: d.area, reverse=True)
    return out


AREA_TIE_WINDOW = 0.10  # fractional area gap below which height breaks the tie


def identify_target(detections: list[Detection],
                    f_px: float = CameraModel().f_px) -> Optional[Detection]:
    """Pick the wheelchair user: largest box, shorter person on a near-tie."""
    persons = [d for d in detections if d.cls == "person"]
    if not persons:
        return None
    persons = sorted(persons, key=lambda d: d.area, reverse=True)
    if len(persons) >= 2:
        a, b = persons[0], persons[1]
        if a.area > 0 and (a.area - b.area) / a.area < AREA_TIE_WINDOW:
            return min((a, b), key=lambda d: d.estimated_height(f_px))
    return persons[0]


def observe(world: WorldState, camera: CameraModel,
            rng: Optional[np.random.Generator] = None,
            previous: Optional[TrackingObservation] = None) -> TrackingObservation:
    """One perception tick: detect, identify, and update staleness."""
    target = identify_target(detect(world, camera, rng), camera.f_px)
    if target is None:
        prev = previous or TrackingObservation()
        return TrackingObservation(
            deviation_px=prev.deviation_px,
            distance=prev.distance,
            in_frame=False,
            target_height_px=prev.target_height_px,
            staleness=prev.staleness + 1,
        )
    return TrackingObservation(
        deviation_px=target.cx - camera.image_width / 2.0,
        distance=target.depth,
        in_frame=True,
        target_height_px=target.h,
        staleness=0,
    )


@dataclass
class Perceiver:
    """Runs perception every ``period_steps`` sim steps and carries staleness."""

    camera: CameraModel = field(default_factory=CameraModel)
    period_steps: int = 8
    last: TrackingObservation = field(default_factory=TrackingObservation)

    def maybe_observe(self, world: WorldState, step_index: int,
                      rng: Optional[np.random.Generator] = None) -> TrackingObservation:
        if step_index % self.period_steps == 0:
            self.last = observe(world, self.camera, rng, previous=self.last)
        return self.last
