"""Pipeline state machine: keyword events arbitrate between following,
switching, local teleoperation, and remote assistance.

``transition`` is a total function over (state, event); unknown pairs keep
the state with no action.  Exiting teleop or remote assist always returns
to following from behind (widest view).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Union

from .switching import FollowMode


@dataclass(frozen=True)
class Following:
    mode: FollowMode = FollowMode.BEHIND


@dataclass(frozen=True)
class Switching:
    from_mode: FollowMode
    to_mode: FollowMode
    attempts: int = 0


@dataclass(frozen=True)
class Teleop:
    pass


@dataclass(frozen=True)
class RemoteAssist:
    pass


PipelineState = Union[Following, Switching, Teleop, RemoteAssist]

INITIAL_STATE: PipelineState = Following(FollowMode.BEHIND)


class Keyword(enum.Enum):
    GO_LEFT = "go_left"
    GO_RIGHT = "go_right"
    GO_BACK = "go_back"
    REMOTE_CONTROL = "remote_control"
    HELP = "help"


@dataclass(frozen=True)
class KeywordEvent:
    keyword: Keyword


@dataclass(frozen=True)
class SwitchComplete:
    pass


@dataclass(frozen=True)
class SwitchAborted:
    displacement: float = 0.0


@dataclass(frozen=True)
class TeleopExit:
    pass


@dataclass(frozen=True)
class RemoteRelease:
    pass


Event = Union[KeywordEvent, SwitchComplete, SwitchAborted, TeleopExit, RemoteRelease]

ALL_EVENTS: tuple[Event, ...] = tuple(
    [KeywordEvent(k) for k in Keyword]
    + [SwitchComplete(), SwitchAborted(), TeleopExit(), RemoteRelease()]
)


class Action(enum.Enum):
    NONE = "none"
    START_SWITCH = "start_switch"
    REPLAN_SWITCH = "replan_switch"
    ABANDON_SWITCH = "abandon_switch"    # too many aborts; fall back to from-mode
    HALT_AND_TAKEOVER = "halt_and_takeover"  # entering teleop / remote assist


MAX_SWITCH_REPLANS = 3

_KEYWORD_TO_MODE = {
    Keyword.GO_LEFT: FollowMode.LEFT,
    Keyword.GO_RIGHT: FollowMode.RIGHT,
    Keyword.GO_BACK: FollowMode.BEHIND,
}


def transition(state: PipelineState, event: Event) -> tuple[PipelineState, Action]:
    if isinstance(event, KeywordEvent):
        kw = event.keyword
        if isinstance(state, (Following, Switching)):
            if kw == Keyword.REMOTE_CONTROL:
                return Teleop(), Action.HALT_AND_TAKEOVER
            if kw == Keyword.HELP:
                return RemoteAssist(), Action.HALT_AND_TAKEOVER
            if isinstance(state, Following) and kw in _KEYWORD_TO_MODE:
                target = _KEYWORD_TO_MODE[kw]
                if target == state.mode:
                    return state, Action.NONE
                return Switching(state.mode, target), Action.START_SWITCH
            return state, Action.NONE
        if isinstance(state, Teleop) and kw == Keyword.HELP:
            return RemoteAssist(), Action.HALT_AND_TAKEOVER
        return state, Action.NONE

    if isinstance(state, Switching):
        if isinstance(event, SwitchComplete):
            return Following(state.to_mode), Action.NONE
        if isinstance(event, SwitchAborted):
            if state.attempts >= MAX_SWITCH_REPLANS:
                return Following(state.from_mode), Action.ABANDON_SWITCH
            return replace(state, attempts=state.attempts + 1), Action.REPLAN_SWITCH

    if isinstance(state, Teleop) and isinstance(event, TeleopExit):
        return Following(FollowMode.BEHIND), Action.NONE
    if isinstance(state, RemoteAssist) and isinstance(event, RemoteRelease):
        return Following(FollowMode.BEHIND), Action.NONE

    return state, Action.NONE
