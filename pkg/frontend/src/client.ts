/**
 * Transport-agnostic session driver: owns the outgoing sequence
 * counter, the hello handshake, and command framing.  The browser
 * build plugs a WebSocket-to-TCP bridge in as the transport; tests use
 * a raw TCP socket.
 */
import {
  LineSplitter,
  Message,
  OperatorCommand,
  commandPayload,
  decode,
  encode,
} from "./protocol.js";

export interface Transport {
  send(data: string): void;
}

export class Session {
  private seq = 0;
  private session = "";
  private splitter = new LineSplitter();

  constructor(
    private transport: Transport,
    private onMessage: (msg: Message) => void,
  ) {}

  get sessionId(): string {
    return this.session;
  }

  /** Feed raw bytes from the transport; emits decoded messages. */
  receive(chunk: string): void {
    for (const line of this.splitter.push(chunk)) {
      const msg = decode(line);
      if (msg.kind === "ack" && typeof msg.payload.session === "string") {
        this.session = msg.payload.session;
      }
      this.onMessage(msg);
    }
  }

  private send(kind: "command" | "control", payload: unknown): number {
    this.seq += 1;
    this.transport.send(
      encode({ kind, seq: this.seq, session: this.session, payload }),
    );
    return this.seq;
  }

  hello(token: string): number {
    return this.send("control", { action: "hello", token });
  }

  claim(): number {
    return this.send("control", { action: "claim" });
  }

  release(): number {
    return this.send("control", { action: "release" });
  }

  command(cmd: OperatorCommand): number {
    return this.send("command", commandPayload(cmd));
  }
}
