"""Wire protocol: versioned newline-delimited JSON messages.

Encoding is canonical (sorted keys, compact separators, UTF-8) so golden
byte-for-byte fixtures stay stable across runs.  See PROTOCOL.md for the
payload schemas.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PROTOCOL_VERSION = 1

KINDS = ("state", "command", "control", "ack", "error")

OPERATOR_TABS = ("base", "arm_low", "arm_high", "gripper", "camera")

# per-tab action vocabulary and magnitude caps
TAB_ACTIONS: dict[str, dict[str, float]] = {
    "base": {"translate": 1.0, "rotate": 1.0},
    "arm_low": {"lift": 0.2, "extend": 0.2},
    "arm_high": {"lift": 0.2, "extend": 0.2},
    "gripper": {"open": 1.0, "close": 1.0, "wrist": 45.0},
    "camera": {"pan": 45.0},
}


class ProtocolError(ValueError):
    def __init__(self, message: str, fieldname: str = ""):
        super().__init__(message)
        self.fieldname = fieldname


@dataclass(frozen=True)
class Message:
    kind: str
    seq: int
    session: str = ""
    payload: dict = field(default_factory=dict)
    protocol_version: int = PROTOCOL_VERSION


def encode(message: Message) -> bytes:
    doc = {
        "kind": message.kind,
        "payload": message.payload,
        "protocol_version": message.protocol_version,
        "seq": message.seq,
        "session": message.session,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8") + b"\n"


def decode(data: bytes | str) -> Message:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"malformed JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ProtocolError("message must be a JSON object")

    for name in ("kind", "seq", "payload", "protocol_version", "session"):
        if name not in doc:
            raise ProtocolError(f"missing field: {name}", fieldname=name)

    kind = doc["kind"]
    if kind not in KINDS:
        raise ProtocolError(f"unknown kind: {kind!r}", fieldname="kind")
    if not isinstance(doc["seq"], int):
        raise ProtocolError("seq must be an integer", fieldname="seq")
    if doc["protocol_version"] != PROTOCOL_VERSION:
        raise ProtocolError(
            f"unsupported protocol_version: {doc['protocol_version']!r}",
            fieldname="protocol_version")
    if not isinstance(doc["payload"], dict):
        raise ProtocolError("payload must be an object", fieldname="payload")
    if not isinstance(doc["session"], str):
        raise ProtocolError("session must be a string", fieldname="session")

    return Message(kind=kind, seq=doc["seq"], session=doc["session"],
                   payload=doc["payload"],
                   protocol_version=doc["protocol_version"])


@dataclass(frozen=True)
class OperatorCommand:
    """Typed five-tab command; the originating click (if any) rides along
    for audit only."""

    tab: str
    action: str
    magnitude: float = 0.0
    click: tuple[float, float] | None = None  # normalized (u, v) in [0,1]^2

    def __post_init__(self):
        if self.tab not in OPERATOR_TABS:
            raise ProtocolError(f"unknown tab: {self.tab!r}", fieldname="tab")
        if self.action not in TAB_ACTIONS[self.tab]:
            raise ProtocolError(
                f"unknown action {self.action!r} for tab {self.tab!r}",
                fieldname="action")

    @property
    def cap(self) -> float:
        return TAB_ACTIONS[self.tab][self.action]

    def clamped_magnitude(self) -> tuple[float, bool]:
        cap = self.cap
        if self.magnitude > cap:
            return cap, True
        if self.magnitude < -cap:
            return -cap, True
        return self.magnitude, False

    def to_payload(self) -> dict:
        doc: dict[str, Any] = {
            "action": self.action,
            "magnitude": self.magnitude,
            "tab": self.tab,
        }
        if self.click is not None:
            doc["click"] = [self.click[0], self.click[1]]
        return doc

    @staticmethod
    def from_payload(payload: dict) -> "OperatorCommand":
        for name in ("tab", "action"):
            if name not in payload:
                raise ProtocolError(f"missing field: {name}", fieldname=name)
        click = payload.get("click")
        if click is not None:
            click = (float(click[0]), float(click[1]))
        return OperatorCommand(
            tab=payload["tab"],
            action=payload["action"],
            magnitude=float(payload.get("magnitude", 0.0)),
            click=click,
        )
