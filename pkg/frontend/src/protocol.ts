// Message schema shared with the realtime server. Every frame is one JSON
// text message carrying a schema version `v`.

export const SCHEMA_VERSION = 1;

export type Mode = "manual" | "slave" | "autonomous" | "cooperative";
export const MODES: Mode[] = ["manual", "slave", "autonomous", "cooperative"];

export interface TargetView {
  id: number;
  kind: "task" | "distractor";
  x: number; // mm, screen centre origin, y up
  y: number;
  speed: number;
  progress: number; // accumulated / required lase time
  state: string;
}

export interface Score {
  completed: number;
  failed: number;
  total_spawned: number;
}

export interface Snapshot {
  v: number;
  tick_index: number;
  time: number;
  mode: Mode;
  status: "paused" | "running" | "ended";
  targets: TargetView[];
  tip_point: [number, number];
  locked_target: number | null;
  gaze_point: [number, number] | null;
  score: Score;
  stale_inputs: number;
}

export interface HelloMsg {
  kind: "hello";
  v: number;
  modes: Mode[];
}

export interface ConfigureReply {
  kind: "configure";
  v: number;
  ok: boolean;
  session_id: string;
  mode: Mode;
  status: string;
}

export interface StartMsg {
  kind: "start";
  v: number;
  session_id: string;
}

export interface ErrorMsg {
  kind: "error";
  v: number;
  message: string;
}

export type SnapshotMsg = Snapshot & { kind: "snapshot" };
export type EndMsg = Snapshot & { kind: "end" };

export type ServerMessage =
  | HelloMsg
  | ConfigureReply
  | StartMsg
  | SnapshotMsg
  | EndMsg
  | ErrorMsg;

export interface InputMessage {
  kind: "input";
  v: number;
  timestamp: number;
  handle_point: [number, number]; // normalized [0,1]^2, y down
  gaze_point: [number, number] | null;
  trigger: boolean;
}

const clamp01 = (v: number) => (v < 0 ? 0 : v > 1 ? 1 : v);

export function makeInputMessage(
  timestamp: number,
  handle: [number, number],
  gaze: [number, number] | null,
  trigger: boolean,
): InputMessage {
  return {
    kind: "input",
    v: SCHEMA_VERSION,
    timestamp,
    handle_point: [clamp01(handle[0]), clamp01(handle[1])],
    gaze_point: gaze === null ? null : [clamp01(gaze[0]), clamp01(gaze[1])],
    trigger,
  };
}

export function encode(msg: unknown): string {
  return JSON.stringify(msg);
}

export function decodeServerMessage(text: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new Error("malformed server frame");
  }
  const msg = raw as { kind?: string; v?: number };
  if (typeof msg.kind !== "string") {
    throw new Error("server frame missing kind");
  }
  if (msg.v !== SCHEMA_VERSION) {
    throw new Error(`unsupported schema version ${msg.v}`);
  }
  return raw as ServerMessage;
}

export const helloMessage = () => ({ kind: "hello", v: SCHEMA_VERSION });

export const configureMessage = (mode: Mode, seed?: number) => ({
  kind: "configure",
  v: SCHEMA_VERSION,
  mode,
  ...(seed !== undefined ? { seed } : {}),
});

export const startMessage = () => ({ kind: "start", v: SCHEMA_VERSION });
