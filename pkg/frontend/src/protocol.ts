/**
 * Wire protocol: versioned newline-delimited JSON (see ../../PROTOCOL.md).
 *
 * Encoding is canonical: UTF-8, keys sorted, compact separators, one
 * trailing newline.  The server emits numbers that are semantically
 * floats with a decimal point even when integer-valued ("0.0"), so the
 * encoder distinguishes floats from integers with a {@link float}
 * wrapper; schema-typed helpers apply it automatically.
 */

export const PROTOCOL_VERSION = 1;

export const KINDS = ["state", "command", "control", "ack", "error"] as const;
export type Kind = (typeof KINDS)[number];

export const OPERATOR_TABS = [
  "base",
  "arm_low",
  "arm_high",
  "gripper",
  "camera",
] as const;
export type Tab = (typeof OPERATOR_TABS)[number];

/** Per-tab action vocabulary with magnitude caps (mirrors the server). */
export const TAB_ACTIONS: Record<Tab, Record<string, number>> = {
  base: { translate: 1.0, rotate: 1.0 },
  arm_low: { lift: 0.2, extend: 0.2 },
  arm_high: { lift: 0.2, extend: 0.2 },
  gripper: { open: 1.0, close: 1.0, wrist: 45.0 },
  camera: { pan: 45.0 },
};

export interface Message {
  kind: Kind;
  seq: number;
  session: string;
  payload: Record<string, unknown>;
  protocol_version: number;
}

export interface OperatorCommand {
  tab: Tab;
  action: string;
  magnitude: number;
  click?: [number, number];
}

/** A number that must serialize with a decimal point (Python float repr). */
export class Float {
  constructor(readonly value: number) {}
}

export function float(value: number): Float {
  return new Float(value);
}

function formatFloat(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`cannot encode non-finite number ${x}`);
  }
  const s = String(x);
  // integer-valued floats keep a decimal point, like Python's repr
  return Number.isInteger(x) && !s.includes("e") && !s.includes("E")
    ? `${s}.0`
    : s;
}

function serialize(value: unknown): string {
  if (value instanceof Float) {
    return formatFloat(value.value);
  }
  if (value === null) {
    return "null";
  }
  if (typeof value === "boolean" || typeof value === "string") {
    return JSON.stringify(value);
  }
  if (typeof value === "number") {
    if (!Number.isFinite(value)) {
      throw new Error(`cannot encode non-finite number ${value}`);
    }
    return String(value);
  }
  if (Array.isArray(value)) {
    return `[${value.map(serialize).join(",")}]`;
  }
  if (typeof value === "object") {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${serialize(v)}`);
    return `{${entries.join(",")}}`;
  }
  throw new Error(`cannot encode value of type ${typeof value}`);
}

/** Canonical serialization of any value tree (Float wrappers allowed). */
export function canonical(value: unknown): string {
  return serialize(value);
}

/** Canonical one-line encoding; payload values may carry Float wrappers. */
export function encode(message: {
  kind: Kind;
  seq: number;
  session: string;
  payload: unknown;
  protocol_version?: number;
}): string {
  return (
    serialize({
      kind: message.kind,
      payload: message.payload,
      protocol_version: message.protocol_version ?? PROTOCOL_VERSION,
      seq: message.seq,
      session: message.session,
    }) + "\n"
  );
}

export class ProtocolError extends Error {
  constructor(
    message: string,
    readonly field: string = "",
  ) {
    super(message);
  }
}

export function decode(line: string): Message {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (e) {
    throw new ProtocolError(`malformed JSON: ${(e as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("message must be a JSON object");
  }
  const obj = doc as Record<string, unknown>;
  for (const name of ["kind", "seq", "payload", "protocol_version", "session"]) {
    if (!(name in obj)) {
      throw new ProtocolError(`missing field: ${name}`, name);
    }
  }
  if (!KINDS.includes(obj.kind as Kind)) {
    throw new ProtocolError(`unknown kind: ${String(obj.kind)}`, "kind");
  }
  if (typeof obj.seq !== "number" || !Number.isInteger(obj.seq)) {
    throw new ProtocolError("seq must be an integer", "seq");
  }
  if (obj.protocol_version !== PROTOCOL_VERSION) {
    throw new ProtocolError(
      `unsupported protocol_version: ${String(obj.protocol_version)}`,
      "protocol_version",
    );
  }
  if (typeof obj.payload !== "object" || obj.payload === null) {
    throw new ProtocolError("payload must be an object", "payload");
  }
  if (typeof obj.session !== "string") {
    throw new ProtocolError("session must be a string", "session");
  }
  return {
    kind: obj.kind as Kind,
    seq: obj.seq,
    session: obj.session,
    payload: obj.payload as Record<string, unknown>,
    protocol_version: obj.protocol_version,
  };
}

/** Command payload with magnitude and click encoded as floats. */
export function commandPayload(cmd: OperatorCommand): Record<string, unknown> {
  const actions = TAB_ACTIONS[cmd.tab];
  if (!(cmd.action in actions)) {
    throw new ProtocolError(
      `unknown action ${cmd.action} for tab ${cmd.tab}`,
      "action",
    );
  }
  const payload: Record<string, unknown> = {
    action: cmd.action,
    magnitude: float(cmd.magnitude),
    tab: cmd.tab,
  };
  if (cmd.click) {
    payload.click = [float(cmd.click[0]), float(cmd.click[1])];
  }
  return payload;
}

/** Splits a byte stream into complete lines, buffering partial tails. */
export class LineSplitter {
  private tail = "";

  push(chunk: string): string[] {
    this.tail += chunk;
    const parts = this.tail.split("\n");
    this.tail = parts.pop() ?? "";
    return parts.filter((p) => p.length > 0);
  }
}
