/**
 * Click-to-command mapping for the five console tabs.
 *
 * Clicks are normalized to (u, v) in [0,1]^2 with u growing rightward
 * and v growing downward.  Each region maps to one action; the
 * magnitude scales linearly with the click's distance from the region
 * center, capped at the per-action maximum.  The exact arithmetic is
 * frozen by the golden fixtures in test/fixtures, which are generated
 * by the server-side canonical encoder.
 *
 * Region layout:
 *  - base:    left/right thirds rotate (+/-), middle third translates,
 *             top half forward, bottom half backward
 *  - arm_*:   dominant axis wins; vertical -> lift (up +), horizontal ->
 *             extend (left -, right +)
 *  - gripper: left third opens, right third closes, middle is wrist
 *             (top +, bottom -)
 *  - camera:  left half pans negative, right half positive
 */
import { OperatorCommand, TAB_ACTIONS, Tab } from "./protocol.js";

function ratio(x: number, center: number, half: number): number {
  return Math.min(1, Math.abs(x - center) / half);
}

export function clickToCommand(tab: Tab, u: number, v: number): OperatorCommand {
  if (!(u >= 0 && u <= 1 && v >= 0 && v <= 1)) {
    throw new RangeError(`click out of bounds: (${u}, ${v})`);
  }
  const caps = TAB_ACTIONS[tab];
  let action: string;
  let magnitude: number;

  switch (tab) {
    case "base":
      if (u < 1 / 3) {
        action = "rotate";
        magnitude = caps.rotate! * ratio(u, 1 / 6, 1 / 6);
      } else if (u > 2 / 3) {
        action = "rotate";
        magnitude = -caps.rotate! * ratio(u, 5 / 6, 1 / 6);
      } else {
        action = "translate";
        magnitude =
          v < 0.5
            ? caps.translate! * ratio(v, 0.25, 0.25)
            : -caps.translate! * ratio(v, 0.75, 0.25);
      }
      break;
    case "arm_low":
    case "arm_high":
      if (Math.abs(v - 0.5) >= Math.abs(u - 0.5)) {
        action = "lift";
        magnitude =
          v < 0.5
            ? caps.lift! * ratio(v, 0.25, 0.25)
            : -caps.lift! * ratio(v, 0.75, 0.25);
      } else {
        action = "extend";
        magnitude =
          u < 0.5
            ? -caps.extend! * ratio(u, 0.25, 0.25)
            : caps.extend! * ratio(u, 0.75, 0.25);
      }
      break;
    case "gripper":
      if (u < 1 / 3) {
        action = "open";
        magnitude = 1.0;
      } else if (u > 2 / 3) {
        action = "close";
        magnitude = 1.0;
      } else {
        action = "wrist";
        magnitude =
          v < 0.5
            ? caps.wrist! * ratio(v, 0.25, 0.25)
            : -caps.wrist! * ratio(v, 0.75, 0.25);
      }
      break;
    case "camera":
      action = "pan";
      magnitude =
        u < 0.5
          ? -caps.pan! * ratio(u, 0.5, 0.5)
          : caps.pan! * ratio(u, 0.5, 0.5);
      break;
  }

  return { tab, action, magnitude, click: [u, v] };
}
