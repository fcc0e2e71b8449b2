"""The single-threaded simulation loop.

One step: drain scripted and external inputs, feed the FSM, run exactly
one command source for the current pipeline state, saturate, integrate.
Perception runs on its own tick schedule regardless of state so that a
recorded trace replays bit-identically.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from . import fsm
from .follow import (FollowParams, LOST_FAILURE_TICKS, accompany_control,
                     behind_control, lost_target)
from .fsm import (Action, Following, KeywordEvent, PipelineState, RemoteAssist,
                  RemoteRelease, Switching, SwitchAborted, SwitchComplete,
                  Teleop, TeleopExit, transition)
from .geometry import Pose2, angle_diff, dist_point_to_segment
from .perception import Perceiver, TrackingObservation
from .protocol import OperatorCommand
from .scenario import ScenarioConfig
from .sim import (BaseCommand, WorldState, ZERO_COMMAND, apply_manipulation,
                  step as sim_step)
from .speech import (ScriptedTranscriber, UtteranceCollector, detect_keywords,
                     read_label_file, FRAME_SECONDS)
from .switching import (FollowMode, SWITCH_TARGETS, SwitchExecutor,
                        check_collision, plan_switch)
from .teleop import PadState, map_input

KEYWORD_TO_EVENT = {kw: KeywordEvent(kw) for kw in fsm.Keyword}

BASE_PULSE_SECONDS = 0.5
FACE_RECOVER_RATE = 45.0  # deg/s camera recenter while the target is lost
ACCOMPANY_DRIFT_WARN = 0.3


def state_name(state: PipelineState) -> str:
    if isinstance(state, Following):
        return f"following_{state.mode.value}"
    if isinstance(state, Switching):
        return f"switching_{state.from_mode.value}_{state.to_mode.value}"
    if isinstance(state, Teleop):
        return "teleop"
    return "remote_assist"


def _event_name(event) -> str:
    if isinstance(event, KeywordEvent):
        return f"keyword_{event.keyword.value}"
    return type(event).__name__


_EVENT_BY_NAME = {
    "SwitchComplete": SwitchComplete,
    "SwitchAborted": SwitchAborted,
    "TeleopExit": TeleopExit,
    "RemoteRelease": RemoteRelease,
}


def _event_from_name(name: str):
    if name.startswith("keyword_"):
        return KeywordEvent(fsm.Keyword(name[len("keyword_"):]))
    return _EVENT_BY_NAME[name]()


def _trace_event(event):
    """Trace entry for an event; aborts carry their displacement so replay
    reproduces the switch metrics exactly."""
    if isinstance(event, SwitchAborted):
        return ["SwitchAborted", event.displacement]
    return _event_name(event)


def _event_from_trace(entry):
    if isinstance(entry, (list, tuple)):
        return SwitchAborted(float(entry[1]))
    return _event_from_name(entry)


def dist_to_polyline(x: float, y: float, path) -> float:
    if len(path) < 2:
        if not path:
            return float("inf")
        return math.hypot(x - path[0][0], y - path[0][1])
    return min(dist_point_to_segment(x, y, ax, ay, bx, by)
               for (ax, ay), (bx, by) in zip(path, path[1:]))


@dataclass
class RunMetrics:
    duration: float = 0.0
    steps: int = 0
    follow_success: bool = True
    target_lost: bool = False
    max_consecutive_stale: int = 0
    time_in_frame_fraction: float = 1.0
    distance_ok: bool = True
    transitions: list = field(default_factory=list)
    switches: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    task_completion_time: Optional[float] = None
    final_state: str = ""
    chair_corridor_distances: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "chair_corridor_distances": {k: round(v, 9) for k, v in
                                         sorted(self.chair_corridor_distances.items())},
            "distance_ok": self.distance_ok,
            "duration": round(self.duration, 9),
            "final_state": self.final_state,
            "follow_success": self.follow_success,
            "max_consecutive_stale": self.max_consecutive_stale,
            "steps": self.steps,
            "switches": self.switches,
            "target_lost": self.target_lost,
            "task_completion_time": (None if self.task_completion_time is None
                                     else round(self.task_completion_time, 9)),
            "time_in_frame_fraction": round(self.time_in_frame_fraction, 9),
            "transitions": self.transitions,
            "warnings": self.warnings,
        }


class Simulation:
    """Owns a world, a pipeline FSM, and all command sources.

    ``trace`` (from a previous run's ``sim.trace``) switches the loop to
    replay mode: recorded commands, manipulations, and events are applied
    verbatim and the controllers are bypassed.
    """

    def __init__(self, config: ScenarioConfig, record_trace: bool = False,
                 trace: Optional[list] = None):
        self.config = config
        self.world: WorldState = config.initial_world()
        self.state: PipelineState = Following(config.initial_mode)
        self.rng = np.random.default_rng(config.seed)
        self.perceiver = Perceiver(camera=config.camera,
                                   period_steps=config.perception_period)
        self.events: deque = deque()
        self.inbox: deque = deque()   # thread-safe enough: appends from service
        self.executor: Optional[SwitchExecutor] = None
        self.current_pad = PadState()
        self._prev_gripper_button = False
        self._gripper_closed = False
        self.pulse_cmd = ZERO_COMMAND
        self.pulse_steps = 0
        self.last_follow_cmd = ZERO_COMMAND
        self.step_index = 0
        self.metrics = RunMetrics()
        self._stale_run = 0
        self._frame_ticks = 0
        self._follow_ticks = 0
        self._drift_warned = False
        self.command_source = ""
        self.alerts: list[str] = []

        self.record_trace = record_trace or trace is None
        self.trace: list = []
        self.replay = trace
        self._manip_log: list = []

        self._kw_idx = 0
        self._teleop_idx = 0
        self._remote_idx = 0
        self._keywords = list(config.keywords)
        if config.speech_labels:
            self._keywords += self._keywords_from_labels(config.speech_labels)
            self._keywords.sort(key=lambda x: x[0])

    def _keywords_from_labels(self, spec: dict) -> list:
        """Run the VAD collector over a label file; scripted transcripts
        become keyword schedule entries at each utterance end."""
        labels = read_label_file(spec["file"])
        transcriber = ScriptedTranscriber(script=dict(spec.get("script", {})))
        collector = UtteranceCollector(self.config.vad)
        out = []
        for i, voiced in enumerate(labels):
            utt = collector.push(i, voiced)
            if utt is not None:
                text = transcriber.transcribe(utt)
                if text:
                    out.append((utt.end_time, text))
        return out

    # ---- external inputs (service thread enqueues, loop drains) ----

    def submit_operator_command(self, cmd: OperatorCommand) -> dict:
        """Apply an operator command; returns the ack payload fields.

        Called from the loop thread (scripted runs) or service drain.
        """
        if not isinstance(self.state, RemoteAssist):
            return {"ok": False, "error": "not in remote mode"}
        magnitude, clamped = cmd.clamped_magnitude()
        if cmd.tab == "base":
            steps = max(1, round(BASE_PULSE_SECONDS / self.config.dt))
            if cmd.action == "translate":
                self.pulse_cmd = BaseCommand(v=magnitude * self.world.robot.v_cap)
            else:
                self.pulse_cmd = BaseCommand(w=magnitude * self.world.robot.w_cap)
            self.pulse_steps = steps
        elif cmd.tab in ("arm_low", "arm_high"):
            clamped |= self._manip(cmd.action, magnitude)
        elif cmd.tab == "gripper":
            if cmd.action == "open":
                self._manip("gripper_open", 0.0)
            elif cmd.action == "close":
                self._manip("gripper_close", 0.0)
            else:
                self._manip("wrist", magnitude)
        elif cmd.tab == "camera":
            self._manip("pan", magnitude)
        return {"ok": True, "clamped": clamped}

    def release_remote(self) -> None:
        self.events.append(RemoteRelease())

    def post_event(self, event) -> None:
        self.events.append(event)

    # ---- internals ----

    def _manip(self, joint: str, delta: float) -> bool:
        if joint == "pan":
            robot = self.world.robot
            self.world = replace(self.world, robot=replace(
                robot, face_angle=robot.face_angle + delta))
            clamped = False
        else:
            self.world, report = apply_manipulation(self.world, joint, delta)
            clamped = report.clamped
        self._manip_log.append([joint, delta])
        return clamped

    def _handle_event(self, event) -> None:
        old = self.state
        if isinstance(event, (SwitchComplete, SwitchAborted)) and isinstance(
                old, Switching):
            self._record_switch_result(event)
        self.state, action = transition(old, event)
        if self.state != old or action != Action.NONE:
            self.metrics.transitions.append({
                "time": round(self.world.time, 9),
                "from": state_name(old),
                "to": state_name(self.state),
                "event": _event_name(event),
            })
        if isinstance(event, (TeleopExit, RemoteRelease)):
            self.metrics.task_completion_time = self.world.time

        if action in (Action.START_SWITCH, Action.REPLAN_SWITCH):
            self._start_switch()
        elif action == Action.ABANDON_SWITCH:
            self.executor = None
            self.metrics.warnings.append(
                f"switch abandoned after repeated aborts at t={self.world.time:.2f}")
        elif action == Action.HALT_AND_TAKEOVER:
            self.executor = None
            self.pulse_steps = 0
            self.current_pad = PadState()

    def _start_switch(self) -> None:
        assert isinstance(self.state, Switching)
        wc_pose = self.world.wheelchair.pose
        rel = wc_pose.to_frame(self.world.robot.base)
        plan = plan_switch(rel, self.state.from_mode, self.state.to_mode,
                           footprint=self.world.wheelchair.footprint)
        if check_collision(plan, self.world.wheelchair.footprint):
            self.metrics.warnings.append(
                f"switch plan in collision at t={self.world.time:.2f}")
        self.executor = SwitchExecutor(plan=plan, snapshot=wc_pose,
                                       speed=self.config.switch_speed)

    def _drain_scripts(self, t: float) -> None:
        kws = self._keywords
        while self._kw_idx < len(kws) and kws[self._kw_idx][0] <= t:
            _, text = kws[self._kw_idx]
            self._kw_idx += 1
            cmd = detect_keywords(text.lower())
            if cmd is not None:
                self.events.append(KEYWORD_TO_EVENT[cmd.keyword])
        ts = self.config.teleop_script
        while self._teleop_idx < len(ts) and ts[self._teleop_idx][0] <= t:
            _, pad = ts[self._teleop_idx]
            self._teleop_idx += 1
            self.current_pad = PadState(
                left_stick=tuple(pad.get("left_stick", (0.0, 0.0))),
                right_stick=tuple(pad.get("right_stick", (0.0, 0.0))),
                buttons=frozenset(pad.get("buttons", ())),
            )
        rs = self.config.remote_script
        while self._remote_idx < len(rs) and rs[self._remote_idx][0] <= t:
            _, entry = rs[self._remote_idx]
            self._remote_idx += 1
            if entry.get("release"):
                self.release_remote()
            else:
                self.submit_operator_command(OperatorCommand.from_payload(entry))

    def _follow_command(self, obs: TrackingObservation,
                        mode: FollowMode) -> BaseCommand:
        params = self.config.follow_params_for(mode)
        robot = self.world.robot
        if obs.in_frame:
            self._stale_run = 0
            if mode == FollowMode.BEHIND:
                cmd = behind_control(obs, params, robot.v_cap, robot.w_cap,
                                     face_angle=robot.face_angle)
            else:
                cmd = accompany_control(obs, mode.value, params, robot.v_cap)
            self.last_follow_cmd = cmd
            self._lost_at = None
            return cmd
        lost_for = getattr(self, "_lost_at", None)
        if lost_for is None:
            self._lost_at = self.world.time
            lost_for = self._lost_at
        cmd = lost_target(self.last_follow_cmd, params,
                          self.world.time - lost_for)
        # pan the camera back toward the mode's nominal angle while lost
        nominal = SWITCH_TARGETS[mode].face_angle
        err = angle_diff(nominal, robot.face_angle)
        rate = max(-FACE_RECOVER_RATE, min(FACE_RECOVER_RATE, 3.0 * err))
        return BaseCommand(v=cmd.v, w=cmd.w, face_rate=rate)

    def _update_follow_metrics(self, obs: TrackingObservation,
                               mode: FollowMode) -> None:
        self._follow_ticks += 1
        if obs.in_frame:
            self._frame_ticks += 1
            stale = 0
        else:
            self._stale_run += 1
            stale = self._stale_run
        self.metrics.max_consecutive_stale = max(
            self.metrics.max_consecutive_stale, stale)
        if stale >= LOST_FAILURE_TICKS:
            self.metrics.target_lost = True
        target = self.config.follow_params_for(mode).target_distance
        if self.world.time > 5.0:
            if obs.in_frame:
                if not (0.5 * target <= obs.distance <= 2.0 * target):
                    self.metrics.distance_ok = False
        if mode != FollowMode.BEHIND and not self._drift_warned:
            rel = self.world.wheelchair.pose.to_frame(self.world.robot.base)
            lateral_target = self.config.mode_start_pose(mode)
            expected = self.world.wheelchair.pose.to_frame(lateral_target).y
            if abs(rel.y - expected) > ACCOMPANY_DRIFT_WARN:
                self._drift_warned = True
                self.metrics.warnings.append(
                    f"accompany lateral drift beyond {ACCOMPANY_DRIFT_WARN} m "
                    f"at t={self.world.time:.2f}")

    def _record_switch_result(self, event) -> None:
        """Called while still in the Switching state, from the event itself
        so that trace replay reproduces the same entries."""
        assert isinstance(self.state, Switching)
        entry: dict[str, Any] = {
            "time": round(self.world.time, 9),
            "outcome": ("complete" if isinstance(event, SwitchComplete)
                        else "aborted"),
            "from": self.state.from_mode.value,
            "to": self.state.to_mode.value,
        }
        if isinstance(event, SwitchComplete):
            target = SWITCH_TARGETS[self.state.to_mode]
            rel = self.world.wheelchair.pose.to_frame(self.world.robot.base)
            dist = math.hypot(rel.x, rel.y)
            orbit = math.degrees(math.atan2(rel.y, rel.x))
            entry["distance_error"] = round(abs(dist - target.distance), 9)
            entry["orbit_error"] = round(abs(angle_diff(orbit, target.orbit_angle)), 9)
            entry["base_error"] = round(abs(angle_diff(rel.theta, target.base_angle)), 9)
            entry["face_error"] = round(abs(angle_diff(
                self.world.robot.face_angle, target.face_angle)), 9)
        else:
            entry["displacement"] = round(event.displacement, 9)
        self.metrics.switches.append(entry)

    def step_once(self) -> None:
        if self.replay is not None:
            self._step_replay()
            return

        t = self.world.time
        self._manip_log = []
        self._drain_scripts(t)
        while self.inbox:
            kind, item = self.inbox.popleft()
            if kind == "operator":
                cmd, reply = item
                reply.append(self.submit_operator_command(cmd))
            elif kind == "event":
                self.events.append(item)

        drained_events = []
        while self.events:
            event = self.events.popleft()
            drained_events.append(_trace_event(event))
            self._handle_event(event)

        obs = self.perceiver.maybe_observe(self.world, self.step_index, self.rng)
        perception_tick = self.step_index % self.perceiver.period_steps == 0

        if isinstance(self.state, Following):
            cmd = self._follow_command(obs, self.state.mode)
            self.command_source = "follow"
            if perception_tick:
                self._update_follow_metrics(obs, self.state.mode)
        elif isinstance(self.state, Switching):
            assert self.executor is not None, "switching without an executor"
            cmd, outcome = self.executor.update(self.world)
            self.command_source = "switch"
            if outcome is not None:
                self.events.append(SwitchComplete() if outcome.event == "complete"
                                   else SwitchAborted(outcome.displacement))
        elif isinstance(self.state, Teleop):
            action = map_input(self.current_pad, self.world.robot.v_cap,
                               self.world.robot.w_cap)
            self.command_source = "teleop"
            if action.exit_teleop:
                self.events.append(TeleopExit())
                cmd = ZERO_COMMAND
            else:
                cmd = action.base
                dt = self.config.dt
                if action.lift_rate:
                    self._manip("lift", action.lift_rate * dt)
                if action.extend_rate:
                    self._manip("extend", action.extend_rate * dt)
                if action.gripper_toggle and not self._prev_gripper_button:
                    self._gripper_closed = not self._gripper_closed
                    self._manip("gripper_close" if self._gripper_closed
                                else "gripper_open", 0.0)
                self._prev_gripper_button = action.gripper_toggle
        else:  # RemoteAssist
            self.command_source = "remote"
            if self.pulse_steps > 0:
                cmd = self.pulse_cmd
                self.pulse_steps -= 1
            else:
                cmd = ZERO_COMMAND

        cmd = cmd.saturated(self.world.robot.v_cap, self.world.robot.w_cap)
        if self.record_trace:
            self.trace.append({
                "cmd": [cmd.v, cmd.w, cmd.face_rate],
                "events": drained_events,
                "manips": self._manip_log,
            })
        self.world = sim_step(self.world, cmd, self.config.dt)
        self.step_index += 1

    def _step_replay(self) -> None:
        record = self.replay[self.step_index]
        for entry in record["events"]:
            self._handle_event(_event_from_trace(entry))
        for joint, delta in record["manips"]:
            self._manip(joint, delta)
        obs = self.perceiver.maybe_observe(self.world, self.step_index, self.rng)
        if (isinstance(self.state, Following)
                and self.step_index % self.perceiver.period_steps == 0):
            self._update_follow_metrics(obs, self.state.mode)
        v, w, face = record["cmd"]
        self.world = sim_step(self.world, BaseCommand(v, w, face), self.config.dt)
        self.step_index += 1

    def run(self) -> RunMetrics:
        n_steps = round(self.config.duration / self.config.dt)
        if self.replay is not None:
            n_steps = min(n_steps, len(self.replay))
        for _ in range(n_steps):
            self.step_once()
        return self.finalize()

    def finalize(self) -> RunMetrics:
        m = self.metrics
        m.duration = self.world.time
        m.steps = self.step_index
        m.final_state = state_name(self.state)
        if self._follow_ticks:
            m.time_in_frame_fraction = self._frame_ticks / self._follow_ticks
        m.follow_success = (not m.target_lost) and m.distance_ok
        corridor = self.config.corridor
        for chair in self.world.chairs:
            m.chair_corridor_distances[chair.id] = dist_to_polyline(
                chair.pose.x, chair.pose.y, corridor)
        return m

    # ---- state snapshot for broadcast ----

    def state_update_payload(self) -> dict:
        w = self.world
        obs = self.perceiver.last
        return {
            "alerts": sorted(self.alerts),
            "chairs": [{"id": c.id, "radius": c.radius,
                        "x": round(c.pose.x, 6), "y": round(c.pose.y, 6)}
                       for c in w.chairs],
            "observation": {
                "deviation_px": round(obs.deviation_px, 3),
                "distance": (None if not math.isfinite(obs.distance)
                             else round(obs.distance, 4)),
                "in_frame": obs.in_frame,
                "staleness": obs.staleness,
            },
            "persons": [{"radius": p.radius, "x": round(p.pose.x, 6),
                         "y": round(p.pose.y, 6)} for p in w.persons],
            "pipeline_state": state_name(self.state),
            "robot": {
                "arm_extension": round(w.robot.arm_extension, 4),
                "face_angle": round(w.robot.face_angle, 4),
                "gripper": w.robot.gripper,
                "grasped": w.robot.grasped,
                "lift": round(w.robot.lift, 4),
                "theta": round(w.robot.base.theta, 4),
                "x": round(w.robot.base.x, 6),
                "y": round(w.robot.base.y, 6),
            },
            "time": round(w.time, 4),
            "wheelchair": {"theta": round(w.wheelchair.pose.theta, 4),
                           "x": round(w.wheelchair.pose.x, 6),
                           "y": round(w.wheelchair.pose.y, 6)},
        }
