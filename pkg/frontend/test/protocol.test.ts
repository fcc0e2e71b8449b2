import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  LineSplitter,
  ProtocolError,
  decode,
  encode,
  float,
} from "../src/protocol.js";

const golden = readFileSync(
  new URL("./fixtures/wire_messages.ndjson", import.meta.url),
  "utf-8",
)
  .split("\n")
  .filter((l) => l.length > 0);

// the five golden messages reconstructed with explicit float tags
const MESSAGES = [
  {
    kind: "state" as const,
    seq: 12,
    session: "s1",
    payload: {
      pipeline_state: "following_behind",
      robot: { theta: float(0.0), x: float(-1.2), y: float(0.0) },
      time: float(4.05),
    },
  },
  {
    kind: "command" as const,
    seq: 3,
    session: "s1",
    payload: { action: "translate", magnitude: float(0.5), tab: "base" },
  },
  {
    kind: "control" as const,
    seq: 1,
    session: "",
    payload: { action: "hello", token: "opensesame" },
  },
  {
    kind: "ack" as const,
    seq: 4,
    session: "s1",
    payload: { applied: 3, clamped: false, ok: true },
  },
  {
    kind: "error" as const,
    seq: 5,
    session: "s1",
    payload: { field: "seq", message: "out-of-order seq 7, expected 5" },
  },
];

describe("golden wire encoding", () => {
  it("covers every message kind", () => {
    expect(new Set(MESSAGES.map((m) => m.kind)).size).toBe(5);
    expect(golden).toHaveLength(MESSAGES.length);
  });

  it.each(MESSAGES.map((m, i) => [m.kind, m, golden[i]!] as const))(
    "encodes %s byte-identically to the server golden",
    (_kind, message, line) => {
      expect(encode(message)).toBe(line + "\n");
    },
  );

  it("round-trips every golden line through decode", () => {
    for (const line of golden) {
      const msg = decode(line);
      expect(msg.protocol_version).toBe(1);
      expect(JSON.stringify(msg.payload)).toBe(
        JSON.stringify(JSON.parse(line).payload),
      );
    }
  });
});

describe("decode validation", () => {
  it("rejects unknown kinds", () => {
    const line = JSON.stringify({
      kind: "video",
      seq: 1,
      session: "",
      payload: {},
      protocol_version: 1,
    });
    expect(() => decode(line)).toThrowError(ProtocolError);
    try {
      decode(line);
    } catch (e) {
      expect((e as ProtocolError).field).toBe("kind");
    }
  });

  it("rejects a missing seq", () => {
    const line = '{"kind":"ack","session":"","payload":{},"protocol_version":1}';
    try {
      decode(line);
      expect.unreachable();
    } catch (e) {
      expect((e as ProtocolError).field).toBe("seq");
    }
  });

  it("rejects a wrong protocol version", () => {
    const line = JSON.stringify({
      kind: "ack",
      seq: 1,
      session: "",
      payload: {},
      protocol_version: 2,
    });
    try {
      decode(line);
      expect.unreachable();
    } catch (e) {
      expect((e as ProtocolError).field).toBe("protocol_version");
    }
  });

  it("rejects malformed JSON", () => {
    expect(() => decode("{nope")).toThrowError(ProtocolError);
  });
});

describe("line splitter", () => {
  it("buffers partial lines across chunks", () => {
    const splitter = new LineSplitter();
    expect(splitter.push('{"a":1}\n{"b"')).toEqual(['{"a":1}']);
    expect(splitter.push(":2}\n")).toEqual(['{"b":2}']);
    expect(splitter.push("")).toEqual([]);
  });
});
