"""Local teleoperation: abstract gamepad state to robot action mapping.

The X button always exits teleoperation, regardless of any axis state.
Axes below the dead zone are treated as zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .sim import BaseCommand

DEAD_ZONE = 0.1
LIFT_RATE = 0.2     # m/s of lift travel at full deflection
EXTEND_RATE = 0.15  # m/s of arm extension at full deflection
PAN_RATE = 45.0     # deg/s camera pan while LB/RB held

KNOWN_BUTTONS = frozenset({"A", "B", "X", "Y", "LB", "RB"})


@dataclass(frozen=True)
class PadState:
    left_stick: tuple[float, float] = (0.0, 0.0)
    right_stick: tuple[float, float] = (0.0, 0.0)
    buttons: frozenset = frozenset()

    def __post_init__(self):
        for ax in (*self.left_stick, *self.right_stick):
            if not -1.0 <= ax <= 1.0:
                raise ValueError("stick axes must be in [-1, 1]")
        object.__setattr__(self, "buttons",
                           frozenset(self.buttons) & KNOWN_BUTTONS)


@dataclass(frozen=True)
class TeleopAction:
    exit_teleop: bool = False
    base: BaseCommand = field(default_factory=BaseCommand)
    lift_rate: float = 0.0       # m/s
    extend_rate: float = 0.0     # m/s
    gripper_toggle: bool = False


def _dz(x: float) -> float:
    return x if abs(x) > DEAD_ZONE else 0.0


def map_input(pad: PadState, v_cap: float = 0.3, w_cap: float = 60.0) -> TeleopAction:
    """Map a pad snapshot to a robot action (rates; caller applies dt)."""
    if "X" in pad.buttons:
        return TeleopAction(exit_teleop=True)

    lx, ly = pad.left_stick
    rx, ry = pad.right_stick
    pan = 0.0
    if "LB" in pad.buttons:
        pan -= PAN_RATE
    if "RB" in pad.buttons:
        pan += PAN_RATE
    base = BaseCommand(
        v=_dz(ly) * v_cap,
        w=-_dz(lx) * w_cap,   # stick right = turn clockwise
        face_rate=pan,
    )
    return TeleopAction(
        base=base,
        lift_rate=_dz(ry) * LIFT_RATE,
        extend_rate=_dz(rx) * EXTEND_RATE,
        gripper_toggle="A" in pad.buttons,
    )
