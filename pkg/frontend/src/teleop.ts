/**
 * Keyboard teleop: WASD drives base pulses, X releases control.
 *
 * Key presses translate into the same operator commands the click tabs
 * produce, so the server needs no extra message kind.  Repeats while a
 * key is held are suppressed; one gesture, one message.
 */
import { OperatorCommand } from "./protocol.js";

export type TeleopAction =
  | { type: "command"; command: OperatorCommand }
  | { type: "release" };

const KEY_COMMANDS: Record<string, OperatorCommand> = {
  w: { tab: "base", action: "translate", magnitude: 1.0 },
  s: { tab: "base", action: "translate", magnitude: -1.0 },
  a: { tab: "base", action: "rotate", magnitude: 1.0 },
  d: { tab: "base", action: "rotate", magnitude: -1.0 },
};

export class KeyboardTeleop {
  private held = new Set<string>();

  keyDown(key: string): TeleopAction | null {
    const k = key.toLowerCase();
    if (this.held.has(k)) {
      return null; // auto-repeat while held
    }
    this.held.add(k);
    if (k === "x") {
      return { type: "release" };
    }
    const command = KEY_COMMANDS[k];
    return command ? { type: "command", command } : null;
  }

  keyUp(key: string): void {
    this.held.delete(key.toLowerCase());
  }
}
