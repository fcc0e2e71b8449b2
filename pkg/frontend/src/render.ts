/**
 * Deterministic scene rendering.
 *
 * The renderer turns a state payload into an ordered list of abstract
 * draw commands (strings).  A real canvas backend replays the list;
 * tests hash it, so any unintended change to the scene shows up as a
 * snapshot mismatch.
 */

const SCALE = 50; // px per meter
const CX = 320;
const CY = 240;
const HFOV = 62;
const OCCLUSION: [number, number] = [18, 31];

function px(x: number): number {
  return Math.round(CX + x * SCALE);
}

function py(y: number): number {
  return Math.round(CY - y * SCALE);
}

function num(v: unknown): number {
  return typeof v === "number" ? v : 0;
}

function rec(v: unknown): Record<string, unknown> {
  return typeof v === "object" && v !== null ? (v as Record<string, unknown>) : {};
}

/** Ordered draw commands for one state payload. */
export function renderScene(payload: Record<string, unknown>): string[] {
  const out: string[] = [];
  out.push("clear #10141a");

  const wc = rec(payload.wheelchair);
  out.push(
    `rect wheelchair ${px(num(wc.x))} ${py(num(wc.y))} ${Math.round(1.2 * SCALE)} ` +
      `${Math.round(0.7 * SCALE)} angle ${num(wc.theta).toFixed(1)} #4caf50`,
  );

  for (const chair of (payload.chairs as unknown[]) ?? []) {
    const c = rec(chair);
    out.push(
      `circle chair:${String(c.id)} ${px(num(c.x))} ${py(num(c.y))} ` +
        `${Math.round(num(c.radius) * SCALE)} #b0835a`,
    );
  }
  for (const person of (payload.persons as unknown[]) ?? []) {
    const p = rec(person);
    out.push(
      `circle person ${px(num(p.x))} ${py(num(p.y))} ` +
        `${Math.round(num(p.radius) * SCALE)} #9e9e9e`,
    );
  }

  const robot = rec(payload.robot);
  const rx = px(num(robot.x));
  const ry = py(num(robot.y));
  out.push(`circle robot ${rx} ${ry} ${Math.round(0.17 * SCALE)} #2196f3`);
  const heading = num(robot.theta);
  out.push(`heading ${rx} ${ry} ${heading.toFixed(1)}`);

  // camera FOV wedge with the mast occlusion sector cut out
  const cam = heading + num(robot.face_angle);
  const half = HFOV / 2;
  out.push(
    `wedge fov ${rx} ${ry} from ${(cam - half).toFixed(1)} to ` +
      `${(cam + half).toFixed(1)} #2196f344`,
  );
  out.push(
    `wedge occlusion ${rx} ${ry} from ${(cam - OCCLUSION[1]).toFixed(1)} to ` +
      `${(cam - OCCLUSION[0]).toFixed(1)} #00000088`,
  );

  if (robot.gripper === "closed") {
    out.push(`badge gripper closed${robot.grasped ? ` ${String(robot.grasped)}` : ""}`);
  }

  // planned switch waypoints, when the server includes them
  const plan = (payload.plan as unknown[]) ?? [];
  plan.forEach((wp, i) => {
    const w = rec(wp);
    out.push(`waypoint ${i} ${px(num(w.x))} ${py(num(w.y))}`);
  });

  // deviation/distance overlay mirroring the camera readout
  const obs = rec(payload.observation);
  if (obs.in_frame === true) {
    const distance =
      obs.distance === null ? "-" : `${num(obs.distance).toFixed(2)}m`;
    out.push(
      `text readout deviation ${num(obs.deviation_px).toFixed(1)}px ` +
        `distance ${distance} stale ${num(obs.staleness)}`,
    );
  } else {
    out.push("text readout target lost");
  }

  out.push(`badge mode ${String(payload.pipeline_state)}`);
  if (payload.pipeline_state === "remote_assist") {
    out.push("highlight control-badge");
  }
  for (const alert of (payload.alerts as unknown[]) ?? []) {
    out.push(`text alert ${String(alert)}`);
  }
  out.push(`text clock t=${num(payload.time).toFixed(2)}s`);
  return out;
}

/** FNV-1a 32-bit hash over the joined draw list, as 8 hex digits. */
export function sceneHash(commands: string[]): string {
  const text = commands.join("\n");
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash.toString(16).padStart(8, "0");
}
