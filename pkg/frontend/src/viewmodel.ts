/**
 * Console view model: a pure reducer over connection/network events.
 *
 * The UI renders only this state; network callbacks feed events in, and
 * every user gesture goes through {@link issueCommand} so the invariant
 * "no base-motion command without holding control" lives in one place.
 */
import { Message } from "./protocol.js";

export const STALE_AFTER_MS = 1000;
export const FRESH_AGE_MS = 150;

export type Connection = "connecting" | "online" | "offline";

export interface HistoryEntry {
  seq: number;
  summary: string;
  status: "pending" | "acked" | "failed";
  detail: string;
}

export interface ViewModel {
  connection: Connection;
  session: string;
  controlHeld: boolean;
  viewOnly: boolean;
  latest: Record<string, unknown> | null;
  lastStateAtMs: number | null;
  activeTab: string;
  history: HistoryEntry[];
  toasts: string[];
  errorBanner: string | null;
}

export function initialViewModel(): ViewModel {
  return {
    connection: "connecting",
    session: "",
    controlHeld: false,
    viewOnly: false,
    latest: null,
    lastStateAtMs: null,
    activeTab: "base",
    history: [],
    toasts: [],
    errorBanner: null,
  };
}

export type Event =
  | { type: "connected"; session: string }
  | { type: "disconnected" }
  | { type: "message"; message: Message; nowMs: number }
  | { type: "commandSent"; seq: number; summary: string }
  | { type: "controlClaimed" }
  | { type: "controlDenied" }
  | { type: "controlReleased" }
  | { type: "tabSelected"; tab: string };

const MAX_HISTORY = 50;

export function reduce(vm: ViewModel, event: Event): ViewModel {
  switch (event.type) {
    case "connected":
      return { ...vm, connection: "online", session: event.session, errorBanner: null };
    case "disconnected":
      return { ...vm, connection: "offline", controlHeld: false };
    case "message":
      return applyMessage(vm, event.message, event.nowMs);
    case "commandSent":
      return withHistory(vm, {
        seq: event.seq,
        summary: event.summary,
        status: "pending",
        detail: "",
      });
    case "controlClaimed":
      return { ...vm, controlHeld: true, viewOnly: false };
    case "controlDenied":
      return { ...vm, controlHeld: false, viewOnly: true };
    case "controlReleased":
      return { ...vm, controlHeld: false };
    case "tabSelected":
      return { ...vm, activeTab: event.tab };
  }
}

function withHistory(vm: ViewModel, entry: HistoryEntry): ViewModel {
  return { ...vm, history: [...vm.history, entry].slice(-MAX_HISTORY) };
}

function resolveHistory(
  vm: ViewModel,
  appliedSeq: number,
  status: "acked" | "failed",
  detail: string,
): ViewModel {
  return {
    ...vm,
    history: vm.history.map((h) =>
      h.seq === appliedSeq && h.status === "pending" ? { ...h, status, detail } : h,
    ),
  };
}

function applyMessage(vm: ViewModel, msg: Message, nowMs: number): ViewModel {
  switch (msg.kind) {
    case "state":
      // only acknowledged protocol_version 1 messages are rendered;
      // decode() already enforced the version
      return { ...vm, latest: msg.payload, lastStateAtMs: nowMs };
    case "ack": {
      const applied = msg.payload.applied;
      if (typeof applied !== "number") {
        return vm;
      }
      const clamped = msg.payload.clamped === true ? "clamped" : "";
      return resolveHistory(vm, applied, "acked", clamped);
    }
    case "error": {
      const text = String(msg.payload.message ?? "error");
      const pending = vm.history.filter((h) => h.status === "pending");
      const last = pending[pending.length - 1];
      const next = last ? resolveHistory(vm, last.seq, "failed", text) : vm;
      return { ...next, errorBanner: text };
    }
    default:
      return vm;
  }
}

/** Milliseconds since the last state broadcast, or null before the first. */
export function stateAgeMs(vm: ViewModel, nowMs: number): number | null {
  return vm.lastStateAtMs === null ? null : nowMs - vm.lastStateAtMs;
}

export function isStale(vm: ViewModel, nowMs: number): boolean {
  const age = stateAgeMs(vm, nowMs);
  return age === null || age > STALE_AFTER_MS;
}

export interface Banner {
  kind: "offline" | "stale" | "view-only" | "error";
  text: string;
}

export function banners(vm: ViewModel, nowMs: number): Banner[] {
  const out: Banner[] = [];
  if (vm.connection === "offline") {
    out.push({ kind: "offline", text: "server offline" });
  } else if (vm.connection === "online" && isStale(vm, nowMs)) {
    out.push({ kind: "stale", text: "state is stale" });
  }
  if (vm.viewOnly) {
    out.push({ kind: "view-only", text: "control held elsewhere (view only)" });
  }
  if (vm.errorBanner) {
    out.push({ kind: "error", text: vm.errorBanner });
  }
  return out;
}

/**
 * Gate for user gestures: returns whether the command may be sent.  A
 * rejected gesture leaves a toast and sends nothing, keeping "at most
 * one protocol message per gesture" trivially true.
 */
export function issueCommand(vm: ViewModel): { allowed: boolean; vm: ViewModel } {
  if (vm.connection !== "online") {
    return { allowed: false, vm: { ...vm, toasts: [...vm.toasts, "not connected"] } };
  }
  if (!vm.controlHeld) {
    return {
      allowed: false,
      vm: { ...vm, toasts: [...vm.toasts, "claim control before clicking"] },
    };
  }
  return { allowed: true, vm };
}
