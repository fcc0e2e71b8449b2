"""Scenario configuration: JSON schema validation and default resolution.

Validation errors name the offending path (e.g. ``wheelchair.speed``).
After loading, every default is explicit on the config object; the fully
resolved document is echoed into the run log.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Optional

from .follow import FollowParams
from .geometry import Pose2
from .perception import CameraModel
from .sim import Chair, PersonAgent, RobotState, WheelchairAgent, WorldState
from .switching import (FollowMode, SWITCH_TARGETS, side_approach_distance,
                        DEFAULT_ROBOT_RADIUS)
from .speech import VadConfig


class ScenarioError(ValueError):
    """Schema violation; the message names the offending path."""


def _fail(path: str, msg: str):
    raise ScenarioError(f"{path}: {msg}")


def _get_number(doc: dict, path: str, key: str, default=None, minimum=None):
    value = doc.get(key, default)
    if value is None:
        _fail(f"{path}.{key}", "required value missing")
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        _fail(f"{path}.{key}", f"expected a number, got {value!r}")
    if not math.isfinite(value):
        _fail(f"{path}.{key}", "must be finite")
    if minimum is not None and value < minimum:
        _fail(f"{path}.{key}", f"must be >= {minimum}")
    return float(value)


def _get_pose(doc: dict, path: str, key: str, default=(0.0, 0.0, 0.0)) -> Pose2:
    raw = doc.get(key, list(default))
    if (not isinstance(raw, list) or len(raw) != 3
            or not all(isinstance(v, (int, float)) for v in raw)):
        _fail(f"{path}.{key}", "expected [x, y, theta_deg]")
    return Pose2(float(raw[0]), float(raw[1]), float(raw[2]))


def _get_path(doc: dict, path: str, key: str, default=()) -> tuple:
    raw = doc.get(key, list(default))
    if not isinstance(raw, list):
        _fail(f"{path}.{key}", "expected a list of [x, y] waypoints")
    pts = []
    for i, p in enumerate(raw):
        if (not isinstance(p, (list, tuple)) or len(p) != 2
                or not all(isinstance(v, (int, float)) for v in p)):
            _fail(f"{path}.{key}[{i}]", "expected [x, y]")
        pts.append((float(p[0]), float(p[1])))
    return tuple(pts)


_MODES = {m.value: m for m in FollowMode}


@dataclass
class ScenarioConfig:
    duration: float = 40.0
    dt: float = 0.05
    seed: int = 0
    initial_mode: FollowMode = FollowMode.BEHIND
    perception_period: int = 8
    switch_speed: float = 0.2
    corridor: tuple = ()
    corridor_halfwidth: float = 0.5

    robot_start: Optional[Pose2] = None   # None: derived from initial mode
    v_cap: float = 0.3
    w_cap: float = 60.0

    wheelchair: WheelchairAgent = field(default_factory=WheelchairAgent)
    persons: tuple = ()
    chairs: tuple = ()
    camera: CameraModel = field(default_factory=CameraModel)
    follow: FollowParams = field(default_factory=FollowParams)
    side_target_distance: float = 0.5
    behind_target_distance: float = 1.2
    vad: VadConfig = field(default_factory=VadConfig)

    keywords: tuple = ()        # (time, text)
    teleop_script: tuple = ()   # (time, pad_dict)
    remote_script: tuple = ()   # (time, entry_dict)
    speech_labels: Optional[dict] = None
    raw: dict = field(default_factory=dict)

    def mode_start_pose(self, mode: FollowMode) -> Pose2:
        """Robot world start pose at the mode's target relative to the
        wheelchair start, honoring the footprint standoff for side modes."""
        target = SWITCH_TARGETS[mode]
        dist = target.distance
        if mode in (FollowMode.LEFT, FollowMode.RIGHT):
            dist = side_approach_distance(target, self.wheelchair.footprint,
                                          DEFAULT_ROBOT_RADIUS)
        r = math.radians(target.orbit_angle)
        local = Pose2(dist * math.cos(r), dist * math.sin(r), target.base_angle)
        return self.wheelchair.pose.from_frame(local)

    def initial_world(self) -> WorldState:
        start = self.robot_start or self.mode_start_pose(self.initial_mode)
        face = SWITCH_TARGETS[self.initial_mode].face_angle
        robot = RobotState(base=start, face_angle=face,
                           v_cap=self.v_cap, w_cap=self.w_cap)
        return WorldState(robot=robot, wheelchair=self.wheelchair,
                          persons=self.persons, chairs=self.chairs,
                          rng_seed=self.seed)

    def follow_params_for(self, mode: FollowMode) -> FollowParams:
        target = (self.behind_target_distance if mode == FollowMode.BEHIND
                  else self.side_target_distance)
        f = self.follow
        return FollowParams(target_distance=target, dist_tol=f.dist_tol,
                            dev_tol_px=f.dev_tol_px, k_v=f.k_v, k_w=f.k_w,
                            k_along=f.k_along, lost_policy=f.lost_policy,
                            face_nudge_rate=f.face_nudge_rate)

    def resolved(self) -> dict:
        """Fully resolved config for the run log."""
        doc = {
            "duration": self.duration, "dt": self.dt, "seed": self.seed,
            "initial_mode": self.initial_mode.value,
            "perception_period": self.perception_period,
            "switch_speed": self.switch_speed,
            "corridor": [list(p) for p in self.corridor],
            "corridor_halfwidth": self.corridor_halfwidth,
            "v_cap": self.v_cap, "w_cap": self.w_cap,
            "side_target_distance": self.side_target_distance,
            "behind_target_distance": self.behind_target_distance,
            "wheelchair": asdict(self.wheelchair),
            "persons": [asdict(p) for p in self.persons],
            "chairs": [asdict(c) for c in self.chairs],
            "camera": asdict(self.camera),
            "follow": asdict(self.follow),
            "vad": asdict(self.vad),
            "keywords": [list(k) for k in self.keywords],
        }
        return doc


def _expand_remote_script(raw: list, path: str) -> tuple:
    """Expand optional repeat/interval shorthand into timed entries."""
    entries = []
    for i, e in enumerate(raw):
        if not isinstance(e, dict):
            _fail(f"{path}[{i}]", "expected an object")
        t = _get_number(e, f"{path}[{i}]", "time", minimum=0.0)
        repeat = int(e.get("repeat", 1))
        interval = float(e.get("interval", 0.0))
        if repeat > 1 and interval <= 0.0:
            _fail(f"{path}[{i}].interval", "repeat requires a positive interval")
        body = {k: v for k, v in e.items()
                if k not in ("time", "repeat", "interval")}
        for r in range(repeat):
            entries.append((t + r * interval, dict(body)))
    entries.sort(key=lambda x: x[0])
    return tuple(entries)


def parse_scenario(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ScenarioError("$: scenario must be a JSON object")

    cfg = ScenarioConfig(raw=doc)
    cfg.duration = _get_number(doc, "$", "duration", default=40.0, minimum=0.0)
    cfg.dt = _get_number(doc, "$", "dt", default=0.05, minimum=1e-6)
    cfg.seed = int(_get_number(doc, "$", "seed", default=0))
    cfg.perception_period = int(_get_number(doc, "$", "perception_period",
                                            default=8, minimum=1))
    cfg.switch_speed = _get_number(doc, "$", "switch_speed", default=0.2,
                                   minimum=0.01)
    cfg.corridor_halfwidth = _get_number(doc, "$", "corridor_halfwidth",
                                         default=0.5, minimum=0.0)

    mode_name = doc.get("initial_mode", "behind")
    if mode_name not in _MODES:
        _fail("$.initial_mode", f"expected one of {sorted(_MODES)}, got {mode_name!r}")
    cfg.initial_mode = _MODES[mode_name]

    rob = doc.get("robot", {})
    if not isinstance(rob, dict):
        _fail("$.robot", "expected an object")
    if "start" in rob:
        cfg.robot_start = _get_pose(rob, "$.robot", "start")
    cfg.v_cap = _get_number(rob, "$.robot", "v_cap", default=0.3, minimum=0.0)
    cfg.w_cap = _get_number(rob, "$.robot", "w_cap", default=60.0, minimum=0.0)

    wc = doc.get("wheelchair", {})
    if not isinstance(wc, dict):
        _fail("$.wheelchair", "expected an object")
    fp = wc.get("footprint", [1.2, 0.7])
    if not (isinstance(fp, list) and len(fp) == 2):
        _fail("$.wheelchair.footprint", "expected [length, width]")
    cfg.wheelchair = WheelchairAgent(
        pose=_get_pose(wc, "$.wheelchair", "start"),
        speed=_get_number(wc, "$.wheelchair", "speed", default=0.0, minimum=0.0),
        path=_get_path(wc, "$.wheelchair", "path"),
        seated_height=_get_number(wc, "$.wheelchair", "seated_height",
                                  default=1.3, minimum=0.1),
        radius=_get_number(wc, "$.wheelchair", "radius", default=0.3, minimum=0.01),
        footprint=(float(fp[0]), float(fp[1])),
    )

    persons = []
    for i, p in enumerate(doc.get("persons", [])):
        ppath = f"$.persons[{i}]"
        if not isinstance(p, dict):
            _fail(ppath, "expected an object")
        height = _get_number(p, ppath, "standing_height", default=1.7, minimum=0.1)
        if height <= cfg.wheelchair.seated_height:
            _fail(f"{ppath}.standing_height",
                  "pedestrians must stand taller than the seated wheelchair user")
        persons.append(PersonAgent(
            pose=_get_pose(p, ppath, "start"),
            speed=_get_number(p, ppath, "speed", default=0.0, minimum=0.0),
            path=_get_path(p, ppath, "path"),
            standing_height=height,
            radius=_get_number(p, ppath, "radius", default=0.25, minimum=0.01),
        ))
    cfg.persons = tuple(persons)

    chairs = []
    for i, c in enumerate(doc.get("chairs", [])):
        cpath = f"$.chairs[{i}]"
        if not isinstance(c, dict):
            _fail(cpath, "expected an object")
        pos = c.get("pos")
        if not (isinstance(pos, list) and len(pos) == 2):
            _fail(f"{cpath}.pos", "expected [x, y]")
        chairs.append(Chair(
            id=str(c.get("id", f"chair{i}")),
            pose=Pose2(float(pos[0]), float(pos[1]), 0.0),
            radius=_get_number(c, cpath, "radius", default=0.25, minimum=0.01),
        ))
    cfg.chairs = tuple(chairs)

    cam = doc.get("camera", {})
    if not isinstance(cam, dict):
        _fail("$.camera", "expected an object")
    occ = cam.get("occlusion_sector", [18.0, 31.0])
    if occ is not None and not (isinstance(occ, list) and len(occ) == 2):
        _fail("$.camera.occlusion_sector", "expected [lo_deg, hi_deg] or null")
    try:
        cfg.camera = CameraModel(
            hfov=_get_number(cam, "$.camera", "hfov", default=62.0, minimum=1.0),
            image_width=int(_get_number(cam, "$.camera", "image_width",
                                        default=640, minimum=2)),
            image_height=int(_get_number(cam, "$.camera", "image_height",
                                         default=480, minimum=2)),
            occlusion_sector=None if occ is None else (float(occ[0]), float(occ[1])),
            noise_px=_get_number(cam, "$.camera", "noise_px", default=2.0, minimum=0.0),
            miss_prob=_get_number(cam, "$.camera", "miss_prob", default=0.0,
                                  minimum=0.0),
        )
    except ValueError as e:
        _fail("$.camera", str(e))

    fol = doc.get("follow", {})
    if not isinstance(fol, dict):
        _fail("$.follow", "expected an object")
    try:
        cfg.follow = FollowParams(
            dist_tol=_get_number(fol, "$.follow", "dist_tol", default=0.15, minimum=1e-6),
            dev_tol_px=_get_number(fol, "$.follow", "dev_tol_px", default=30.0,
                                   minimum=1e-6),
            k_v=_get_number(fol, "$.follow", "k_v", default=0.8, minimum=0.0),
            k_w=_get_number(fol, "$.follow", "k_w", default=0.15, minimum=0.0),
            k_along=_get_number(fol, "$.follow", "k_along", default=0.0013,
                                minimum=0.0),
            lost_policy=str(fol.get("lost_policy", "stop")),
        )
    except ValueError as e:
        _fail("$.follow", str(e))
    cfg.side_target_distance = _get_number(fol, "$.follow", "side_target_distance",
                                           default=0.5, minimum=0.01)
    cfg.behind_target_distance = _get_number(fol, "$.follow", "behind_target_distance",
                                             default=1.2, minimum=0.01)

    vad = doc.get("vad", {})
    if not isinstance(vad, dict):
        _fail("$.vad", "expected an object")
    try:
        cfg.vad = VadConfig(
            energy_threshold=_get_number(vad, "$.vad", "energy_threshold",
                                         default=500.0, minimum=0.0),
            padding_window=int(_get_number(vad, "$.vad", "padding_window",
                                           default=10, minimum=1)),
            start_ratio=_get_number(vad, "$.vad", "start_ratio", default=0.9),
            end_ratio=_get_number(vad, "$.vad", "end_ratio", default=0.9),
            max_utterance=_get_number(vad, "$.vad", "max_utterance", default=10.0,
                                      minimum=0.1),
        )
    except ValueError as e:
        _fail("$.vad", str(e))

    kws = []
    for i, k in enumerate(doc.get("keywords", [])):
        kpath = f"$.keywords[{i}]"
        if not isinstance(k, dict) or "text" not in k:
            _fail(kpath, "expected {time, text}")
        kws.append((_get_number(k, kpath, "time", minimum=0.0), str(k["text"])))
    cfg.keywords = tuple(sorted(kws, key=lambda x: x[0]))

    tele = []
    for i, e in enumerate(doc.get("teleop_script", [])):
        tpath = f"$.teleop_script[{i}]"
        if not isinstance(e, dict):
            _fail(tpath, "expected an object")
        tele.append((_get_number(e, tpath, "time", minimum=0.0),
                     {k: v for k, v in e.items() if k != "time"}))
    cfg.teleop_script = tuple(sorted(tele, key=lambda x: x[0]))

    cfg.remote_script = _expand_remote_script(doc.get("remote_script", []),
                                              "$.remote_script")

    cfg.corridor = _get_path(doc, "$", "corridor",
                             default=cfg.wheelchair.path)

    labels = doc.get("speech_labels")
    if labels is not None:
        if not isinstance(labels, dict) or "file" not in labels:
            _fail("$.speech_labels", "expected {file, script}")
        cfg.speech_labels = labels

    return cfg


def load_scenario(path: str | Path) -> ScenarioConfig:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"$: invalid JSON in {p}: {e}") from e
    cfg = parse_scenario(doc)
    cfg.raw["__source__"] = str(p)
    return cfg


def bundled_scenario_path(name: str) -> Path:
    return Path(__file__).parent / "scenarios" / f"{name}.json"
