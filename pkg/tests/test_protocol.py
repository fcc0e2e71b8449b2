"""Wire protocol: canonical encoding, golden bytes, decode errors, and
operator-command validation."""
import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from followbot.protocol import (KINDS, Message, OPERATOR_TABS, OperatorCommand,
                                PROTOCOL_VERSION, ProtocolError, TAB_ACTIONS,
                                decode, encode)

GOLDEN = Path(__file__).parent / "golden" / "wire_messages.ndjson"

GOLDEN_MESSAGES = [
    Message(kind="state", seq=12, session="s1",
            payload={"pipeline_state": "following_behind",
                     "robot": {"theta": 0.0, "x": -1.2, "y": 0.0},
                     "time": 4.05}),
    Message(kind="command", seq=3, session="s1",
            payload={"action": "translate", "magnitude": 0.5, "tab": "base"}),
    Message(kind="control", seq=1, session="",
            payload={"action": "hello", "token": "opensesame"}),
    Message(kind="ack", seq=4, session="s1",
            payload={"applied": 3, "clamped": False, "ok": True}),
    Message(kind="error", seq=5, session="s1",
            payload={"field": "seq", "message": "out-of-order seq 7, expected 5"}),
]


class TestRoundTrip:
    @pytest.mark.parametrize("msg", GOLDEN_MESSAGES,
                             ids=[m.kind for m in GOLDEN_MESSAGES])
    def test_every_kind_round_trips(self, msg):
        assert decode(encode(msg)) == msg

    payloads = st.dictionaries(
        st.text(min_size=1, max_size=8),
        st.one_of(st.integers(-1000, 1000), st.booleans(),
                  st.floats(-100, 100, allow_nan=False),
                  st.text(max_size=12)),
        max_size=6)

    @given(st.sampled_from(KINDS), st.integers(0, 10**9), payloads)
    def test_round_trip_property(self, kind, seq, payload):
        msg = Message(kind=kind, seq=seq, session="sX", payload=payload)
        assert decode(encode(msg)) == msg

    def test_encoding_is_canonical_and_newline_terminated(self):
        raw = encode(GOLDEN_MESSAGES[0])
        assert raw.endswith(b"\n")
        assert b" " not in raw.split(b'"following_behind"')[0]
        doc = json.loads(raw)
        assert list(doc) == sorted(doc)


class TestGoldenBytes:
    def test_matches_stored_fixture(self):
        lines = GOLDEN.read_bytes().splitlines(keepends=True)
        assert len(lines) == len(GOLDEN_MESSAGES)
        for msg, line in zip(GOLDEN_MESSAGES, lines):
            assert encode(msg) == line, msg.kind

    def test_fixture_decodes(self):
        for line in GOLDEN.read_bytes().splitlines():
            decode(line)


class TestDecodeErrors:
    def base_doc(self):
        return {"kind": "ack", "seq": 1, "session": "", "payload": {},
                "protocol_version": PROTOCOL_VERSION}

    @pytest.mark.parametrize("missing", ["kind", "seq", "payload",
                                         "protocol_version", "session"])
    def test_missing_field_named(self, missing):
        doc = self.base_doc()
        del doc[missing]
        with pytest.raises(ProtocolError) as e:
            decode(json.dumps(doc))
        assert e.value.fieldname == missing
        assert missing in str(e.value)

    def test_malformed_json(self):
        with pytest.raises(ProtocolError, match="malformed JSON"):
            decode(b"{nope")

    def test_non_object(self):
        with pytest.raises(ProtocolError):
            decode(b"[1,2]")

    def test_unknown_kind(self):
        doc = self.base_doc()
        doc["kind"] = "telemetry"
        with pytest.raises(ProtocolError) as e:
            decode(json.dumps(doc))
        assert e.value.fieldname == "kind"

    def test_wrong_version(self):
        doc = self.base_doc()
        doc["protocol_version"] = 99
        with pytest.raises(ProtocolError) as e:
            decode(json.dumps(doc))
        assert e.value.fieldname == "protocol_version"

    def test_bad_seq_type(self):
        doc = self.base_doc()
        doc["seq"] = "one"
        with pytest.raises(ProtocolError) as e:
            decode(json.dumps(doc))
        assert e.value.fieldname == "seq"


class TestOperatorCommand:
    def test_five_tabs(self):
        assert OPERATOR_TABS == ("base", "arm_low", "arm_high", "gripper",
                                 "camera")

    @pytest.mark.parametrize("tab", OPERATOR_TABS)
    def test_every_action_validates(self, tab):
        for action in TAB_ACTIONS[tab]:
            cmd = OperatorCommand(tab=tab, action=action, magnitude=0.1)
            assert cmd.cap > 0

    def test_unknown_tab_rejected(self):
        with pytest.raises(ProtocolError) as e:
            OperatorCommand(tab="legs", action="translate")
        assert e.value.fieldname == "tab"

    def test_mismatched_action_rejected(self):
        with pytest.raises(ProtocolError) as e:
            OperatorCommand(tab="camera", action="translate")
        assert e.value.fieldname == "action"

    def test_magnitude_clamps_to_tab_cap(self):
        cmd = OperatorCommand(tab="gripper", action="wrist", magnitude=90.0)
        assert cmd.clamped_magnitude() == (45.0, True)
        cmd = OperatorCommand(tab="base", action="rotate", magnitude=-3.0)
        assert cmd.clamped_magnitude() == (-1.0, True)
        cmd = OperatorCommand(tab="arm_low", action="lift", magnitude=0.1)
        assert cmd.clamped_magnitude() == (0.1, False)

    def test_payload_round_trip(self):
        cmd = OperatorCommand(tab="base", action="translate", magnitude=0.5,
                              click=(0.25, 0.75))
        back = OperatorCommand.from_payload(cmd.to_payload())
        assert back == cmd

    def test_payload_missing_fields(self):
        with pytest.raises(ProtocolError) as e:
            OperatorCommand.from_payload({"tab": "base"})
        assert e.value.fieldname == "action"
