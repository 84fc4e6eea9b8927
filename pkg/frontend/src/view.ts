// View model: everything the renderer and plots read. Built purely from
// received snapshots plus local input state, so reconnecting rebuilds it
// from scratch with no client-side physics.

import { Hello, Snapshot } from "./protocol.js";

export const TRACE_WINDOW_S = 60;
export const STALE_AFTER_MS = 1000;

export type InteractionMode = "observe" | "perturb-object" | "drag-finger";
export type ConnectionStatus = "connecting" | "open" | "closed";

export interface TraceSample {
  t: number;
  wrench: [number, number, number];
  y: number[];
  speed: number[];
  fn: number[];
}

export class SessionView {
  hello: Hello | null = null;
  snapshot: Snapshot | null = null;
  status: ConnectionStatus = "connecting";
  mode: InteractionMode = "perturb-object";
  samples: TraceSample[] = [];
  lastSnapshotAtMs = -Infinity;

  setHello(hello: Hello): void {
    this.hello = hello;
    this.status = "open";
  }

  /** Ingest one snapshot: update the latest state and the rolling buffers. */
  pushSnapshot(snap: Snapshot, nowMs: number): void {
    const last = this.samples[this.samples.length - 1];
    if (last && snap.t < last.t) {
      // Sim time went backwards: the session was reset. Start over.
      this.samples = [];
    }
    this.snapshot = snap;
    this.lastSnapshotAtMs = nowMs;
    const [fx, fy, tau] = snap.applied_wrench;
    this.samples.push({
      t: snap.t,
      wrench: [fx, fy, tau],
      y: snap.fingers.map((f) => f.y),
      speed: snap.fingers.map((f) => Math.hypot(f.cmd[0], f.cmd[1])),
      fn: snap.fingers.map((f) => f.f_n),
    });
    const cutoff = snap.t - TRACE_WINDOW_S;
    let drop = 0;
    while (drop < this.samples.length && this.samples[drop].t < cutoff) drop++;
    if (drop > 0) this.samples.splice(0, drop);
  }

  /** True when no snapshot arrived for over a second. */
  stale(nowMs: number): boolean {
    return this.status === "open" && nowMs - this.lastSnapshotAtMs > STALE_AFTER_MS;
  }
}
