import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { clickToCommand } from "../src/clickmap.js";
import { Tab, canonical, commandPayload } from "../src/protocol.js";

const clicks = JSON.parse(
  readFileSync(new URL("./fixtures/clicks.json", import.meta.url), "utf-8"),
) as { tab: Tab; u: number; v: number }[];

const expected = readFileSync(
  new URL("./fixtures/click_commands.ndjson", import.meta.url),
  "utf-8",
)
  .split("\n")
  .filter((l) => l.length > 0);

describe("golden click fixtures", () => {
  it("has one expected payload per click", () => {
    expect(expected).toHaveLength(clicks.length);
  });

  it.each(clicks.map((c, i) => [`${c.tab} (${c.u}, ${c.v})`, c, expected[i]!] as const))(
    "encodes %s byte-identically to the server golden",
    (_label, click, want) => {
      const cmd = clickToCommand(click.tab, click.u, click.v);
      expect(canonical(commandPayload(cmd))).toBe(want);
    },
  );
});

describe("region mapping", () => {
  it("maps base top-center to forward translate", () => {
    const cmd = clickToCommand("base", 0.5, 0.05);
    expect(cmd.action).toBe("translate");
    expect(cmd.magnitude).toBeGreaterThan(0);
  });

  it("maps camera far left to max negative pan", () => {
    const cmd = clickToCommand("camera", 0.0, 0.5);
    expect(cmd.action).toBe("pan");
    expect(cmd.magnitude).toBe(-45);
  });

  it("attaches the raw click", () => {
    expect(clickToCommand("gripper", 0.1, 0.5).click).toEqual([0.1, 0.5]);
  });

  it("never exceeds the per-action cap", () => {
    for (let u = 0; u <= 1; u += 0.05) {
      for (let v = 0; v <= 1; v += 0.05) {
        for (const tab of ["base", "arm_low", "arm_high", "gripper", "camera"] as Tab[]) {
          const cmd = clickToCommand(tab, u, v);
          expect(Math.abs(cmd.magnitude)).toBeLessThanOrEqual(45.000001);
        }
      }
    }
  });

  it("rejects out-of-bounds clicks", () => {
    expect(() => clickToCommand("base", 1.2, 0.5)).toThrowError(RangeError);
  });
});
