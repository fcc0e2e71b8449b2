"""followbot: a deterministic 2D simulator for a wheelchair-accompanying
assistance robot with keyword-directed mode switching, local teleoperation,
and a remote-assistance service."""

from .fsm import (Action, Following, Keyword, KeywordEvent, RemoteAssist,
                  RemoteRelease, Switching, SwitchAborted, SwitchComplete,
                  Teleop, TeleopExit, transition)
from .follow import FollowParams
from .geometry import Pose2, angle_diff, normalize_angle
from .perception import CameraModel, TrackingObservation
from .protocol import Message, OperatorCommand, ProtocolError, decode, encode
from .runner import RunMetrics, Simulation
from .scenario import ScenarioConfig, ScenarioError, load_scenario, parse_scenario
from .sim import BaseCommand, WorldState, step
from .switching import FollowMode, SwitchPlan, SwitchTarget, plan_switch

__version__ = "0.1.0"

__all__ = [
    "Action", "BaseCommand", "CameraModel", "FollowMode", "FollowParams",
    "Following", "Keyword", "KeywordEvent", "Message", "OperatorCommand",
    "Pose2", "ProtocolError", "RemoteAssist", "RemoteRelease", "RunMetrics",
    "ScenarioConfig", "ScenarioError", "Simulation", "SwitchAborted",
    "SwitchComplete", "SwitchPlan", "SwitchTarget", "Switching", "Teleop",
    "TeleopExit", "TrackingObservation", "WorldState", "angle_diff", "decode",
    "encode", "load_scenario", "normalize_angle", "parse_scenario",
    "plan_switch", "step", "transition",
]
