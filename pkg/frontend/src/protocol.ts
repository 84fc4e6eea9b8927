// Wire protocol of the live session: line-JSON messages over a websocket.
// The client speaks exactly this protocol and nothing else; it never
// computes physics, only displays what the service sends.

export interface Hello {
  type: "hello";
  protocol_version: number;
  tick_seconds: number;
  snapshot_every: number;
  n_fingers: number;
  seed: number;
}

export type Shape =
  | { kind: "disk"; radius: number }
  | { kind: "box"; width: number; height: number }
  | { kind: "polygon"; n_sides: number; circumradius: number };

export type ContactMode = "free" | "stick" | "slip";

export interface FingerState {
  id: number;
  pos: [number, number];
  radius: number;
  f_n: number;
  f_t: number;
  mode: ContactMode;
  y: number;
  y_min: number | null;
  c_pred: string | null;
  cmd: [number, number];
}

export interface Snapshot {
  type: "state";
  tick: number;
  t: number;
  object: { pose: number[]; twist: number[]; shape: Shape };
  fingers: FingerState[];
  applied_wrench: number[];
  active: boolean;
}

export interface Ack {
  type: "ack";
  command: string;
  tick: number;
  id?: number | string | null;
}

export interface ErrorMessage {
  type: "error";
  message: string;
  id?: number | string | null;
}

export type ServerMessage = Hello | Snapshot | Ack | ErrorMessage;

export interface WrenchCommand {
  type: "wrench";
  fx: number;
  fy: number;
  tau: number;
  duration: number;
  id?: number;
}

export interface OverrideCommand {
  type: "override";
  finger: number;
  vx: number;
  vy: number;
  id?: number;
}

export interface ReleaseCommand {
  type: "release";
  finger: number;
  id?: number;
}

export interface SimpleCommand {
  type: "pause" | "resume";
  id?: number;
}

export interface ResetCommand {
  type: "reset";
  seed?: number;
  id?: number;
}

export type Command =
  | WrenchCommand
  | OverrideCommand
  | ReleaseCommand
  | SimpleCommand
  | ResetCommand;

/** Parse one websocket text frame; throws on non-protocol payloads. */
export function parseServerMessage(text: string): ServerMessage {
  const msg = JSON.parse(text);
  if (!msg || typeof msg !== "object" || typeof msg.type !== "string") {
    throw new Error("not a protocol message");
  }
  if (!["hello", "state", "ack", "error"].includes(msg.type)) {
    throw new Error(`unknown message type '${msg.type}'`);
  }
  return msg as ServerMessage;
}
