// Pointer gestures to protocol commands. Dragging on the object applies a
// perturbation wrench proportional to the drag vector; dragging a finger
// streams velocity overrides until pointer-up releases it.

import { Command, Snapshot, WrenchCommand } from "./protocol.js";
import { Camera } from "./render.js";
import { InteractionMode } from "./view.js";

/** Drag-to-force gain; a 10 px drag is a 0.5 N wrench. */
export const DRAG_GAIN_N_PER_PX = 0.05;
/** Wrench magnitude clamp, matching the perturbation range of the trials. */
export const WRENCH_CLAMP_N = 5;
/** Finger-drag velocity gain: 100 px of offset commands 0.05 m/s. */
export const FINGER_GAIN_MPS_PER_PX = 0.0005;
export const FINGER_SPEED_CLAMP = 0.05;

export type Hit = { kind: "object" } | { kind: "finger"; id: number } | null;

/** What the pointer is over, in screen coordinates. Fingers win ties. */
export function hitTest(snap: Snapshot, camera: Camera, px: number, py: number): Hit {
  const [wx, wy] = camera.toWorld(px, py);
  for (const f of snap.fingers) {
    if (Math.hypot(wx - f.pos[0], wy - f.pos[1]) <= f.radius * 1.5) {
      return { kind: "finger", id: f.id };
    }
  }
  const s = snap.object.shape;
  const bound =
    s.kind === "disk"
      ? s.radius
      : s.kind === "box"
        ? Math.hypot(s.width, s.height) / 2
        : s.circumradius;
  const [ox, oy] = snap.object.pose;
  if (Math.hypot(wx - ox, wy - oy) <= bound) return { kind: "object" };
  return null;
}

/** Map an object drag to a wrench command, or null for a zero-length drag.
 * Screen y points down, world y up. */
export function dragToWrench(
  dxPx: number,
  dyPx: number,
  holdSeconds: number,
  gain = DRAG_GAIN_N_PER_PX
): WrenchCommand | null {
  if (dxPx === 0 && dyPx === 0) return null;
  let fx = gain * dxPx + 0; // "+ 0" folds -0 into 0
  let fy = -gain * dyPx + 0;
  const mag = Math.hypot(fx, fy);
  if (mag > WRENCH_CLAMP_N) {
    fx *= WRENCH_CLAMP_N / mag;
    fy *= WRENCH_CLAMP_N / mag;
  }
  return { type: "wrench", fx, fy, tau: 0, duration: Math.max(holdSeconds, 0.05) };
}

/** Map a finger drag offset to an override velocity. */
export function dragToOverride(finger: number, dxPx: number, dyPx: number): Command {
  let vx = FINGER_GAIN_MPS_PER_PX * dxPx;
  let vy = -FINGER_GAIN_MPS_PER_PX * dyPx;
  const speed = Math.hypot(vx, vy);
  if (speed > FINGER_SPEED_CLAMP) {
    vx *= FINGER_SPEED_CLAMP / speed;
    vy *= FINGER_SPEED_CLAMP / speed;
  }
  return { type: "override", finger, vx, vy };
}

interface DragState {
  hit: Exclude<Hit, null>;
  x0: number;
  y0: number;
  startedMs: number;
}

/** Pointer state machine. Feed it pointer events; it emits commands via
 * the provided sender. One wrench per object drag; one release per finger
 * drag, on pointer-up exactly once. */
export class GestureController {
  gain = DRAG_GAIN_N_PER_PX;
  private send: (cmd: Command) => void;
  private drag: DragState | null = null;

  constructor(send: (cmd: Command) => void) {
    this.send = send;
  }

  pointerDown(
    snap: Snapshot | null,
    camera: Camera,
    mode: InteractionMode,
    px: number,
    py: number,
    nowMs: number
  ): void {
    this.drag = null;
    if (!snap || mode === "observe") return;
    const hit = hitTest(snap, camera, px, py);
    if (!hit) return;
    if (mode === "perturb-object" && hit.kind === "object") {
      this.drag = { hit, x0: px, y0: py, startedMs: nowMs };
    } else if (mode === "drag-finger" && hit.kind === "finger") {
      this.drag = { hit, x0: px, y0: py, startedMs: nowMs };
    }
  }

  pointerMove(px: number, py: number): void {
    if (!this.drag || this.drag.hit.kind !== "finger") return;
    this.send(dragToOverride(this.drag.hit.id, px - this.drag.x0, py - this.drag.y0));
  }

  pointerUp(px: number, py: number, nowMs: number): void {
    const drag = this.drag;
    this.drag = null;
    if (!drag) return;
    if (drag.hit.kind === "object") {
      const hold = (nowMs - drag.startedMs) / 1000;
      const cmd = dragToWrench(px - drag.x0, py - drag.y0, hold, this.gain);
      if (cmd) this.send(cmd);
    } else {
      this.send({ type: "release", finger: drag.hit.id });
    }
  }

  /** The current drag vector for on-screen feedback, if any. */
  dragVector(px: number, py: number): [number, number] | null {
    if (!this.drag) return null;
    return [px - this.drag.x0, py - this.drag.y0];
  }
}
