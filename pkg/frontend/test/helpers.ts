// Shared test fixtures: synthetic snapshots and a recording 2D context.

import { ContactMode, FingerState, Snapshot } from "../src/protocol.js";
import { Ctx2D } from "../src/render.js";

export function makeFinger(id: number, overrides: Partial<FingerState> = {}): FingerState {
  const angle = Math.PI / 2 + (2 * Math.PI * id) / 3;
  return {
    id,
    pos: [0.04 * Math.cos(angle), 0.04 * Math.sin(angle)],
    radius: 0.008,
    f_n: 0,
    f_t: 0,
    mode: "free" as ContactMode,
    y: 0,
    y_min: null,
    c_pred: null,
    cmd: [0, 0],
    ...overrides,
  };
}

export function makeSnapshot(tick: number, overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "state",
    tick,
    t: tick * 0.01,
    object: {
      pose: [0, 0, 0],
      twist: [0, 0, 0],
      shape: { kind: "disk", radius: 0.03 },
    },
    fingers: [0, 1, 2].map((i) => makeFinger(i)),
    applied_wrench: [0, 0, 0],
    active: true,
    ...overrides,
  };
}

export interface DrawCall {
  op: string;
  args: number[] | string[];
  fillStyle: string;
  strokeStyle: string;
}

/** Records every drawing call with the style active at the time. */
export class RecordingCtx implements Ctx2D {
  fillStyle = "";
  strokeStyle = "";
  lineWidth = 1;
  font = "";
  globalAlpha = 1;
  calls: DrawCall[] = [];

  private record(op: string, args: number[] | string[] = []): void {
    this.calls.push({ op, args, fillStyle: this.fillStyle, strokeStyle: this.strokeStyle });
  }

  clearRect(x: number, y: number, w: number, h: number): void {
    this.record("clearRect", [x, y, w, h]);
  }
  fillRect(x: number, y: number, w: number, h: number): void {
    this.record("fillRect", [x, y, w, h]);
  }
  beginPath(): void {
    this.record("beginPath");
  }
  arc(x: number, y: number, r: number, a0: number, a1: number): void {
    this.record("arc", [x, y, r, a0, a1]);
  }
  moveTo(x: number, y: number): void {
    this.record("moveTo", [x, y]);
  }
  lineTo(x: number, y: number): void {
    this.record("lineTo", [x, y]);
  }
  closePath(): void {
    this.record("closePath");
  }
  stroke(): void {
    this.record("stroke");
  }
  fill(): void {
    this.record("fill");
  }
  fillText(text: string, x: number, y: number): void {
    this.record("fillText", [text, String(x), String(y)]);
  }

  ops(op: string): DrawCall[] {
    return this.calls.filter((c) => c.op === op);
  }
}
