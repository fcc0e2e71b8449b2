import { describe, expect, it } from "vitest";

import { KeyboardTeleop } from "../src/teleop.js";

describe("keyboard teleop", () => {
  it("maps WASD to base pulses", () => {
    const t = new KeyboardTeleop();
    expect(t.keyDown("w")).toEqual({
      type: "command",
      command: { tab: "base", action: "translate", magnitude: 1.0 },
    });
    t.keyUp("w");
    expect(t.keyDown("s")!.type).toBe("command");
    t.keyUp("s");
    const left = t.keyDown("a");
    t.keyUp("a");
    const right = t.keyDown("d");
    if (left?.type !== "command" || right?.type !== "command") {
      expect.unreachable("a/d must map to commands");
      return;
    }
    expect(left.command.magnitude).toBe(-right.command.magnitude);
  });

  it("suppresses key auto-repeat while held", () => {
    const t = new KeyboardTeleop();
    expect(t.keyDown("W")).not.toBeNull();
    expect(t.keyDown("w")).toBeNull();
    expect(t.keyDown("w")).toBeNull();
    t.keyUp("W");
    expect(t.keyDown("w")).not.toBeNull();
  });

  it("maps X to release", () => {
    expect(new KeyboardTeleop().keyDown("x")).toEqual({ type: "release" });
  });

  it("ignores unmapped keys", () => {
    expect(new KeyboardTeleop().keyDown("q")).toBeNull();
  });
});
