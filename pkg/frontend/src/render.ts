// Canvas scene renderer. Draws only what the latest snapshot says: object
// outline, fingertip disks colored by contact mode, force arrows linear in
// F_N, and the applied-wrench arrow. No interpolation between snapshots.

import { Snapshot } from "./protocol.js";
import { SessionView } from "./view.js";

/** The 2D-context surface the renderer touches; a recording stub suffices
 * for tests, a real CanvasRenderingContext2D in the browser. */
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

/** World-to-screen mapping: uniform scale, world y up, screen y down. */
export class Camera {
  constructor(
    public scale: number, // px per meter
    public cx: number, // screen x of world origin
    public cy: number // screen y of world origin
  ) {}

  toScreen(wx: number, wy: number): [number, number] {
    return [this.cx + wx * this.scale, this.cy - wy * this.scale];
  }

  toWorld(px: number, py: number): [number, number] {
    return [(px - this.cx) / this.scale, (this.cy - py) / this.scale];
  }
}

export const MODE_COLORS: Record<string, string> = {
  free: "#8a8a8a",
  stick: "#2e9e4f",
  slip: "#d63431",
};

export const FINGER_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];

export const FORCE_PX_PER_N = 14;
export const WRENCH_PX_PER_N = 14;

/** Arrow length on screen for a normal force; strictly linear in F_N. */
export function forceArrowLength(fN: number): number {
  return FORCE_PX_PER_N * fN;
}

function drawArrow(ctx: Ctx2D, x0: number, y0: number, x1: number, y1: number): void {
  const dx = x1 - x0;
  const dy = y1 - y0;
  const len = Math.hypot(dx, dy);
  if (len < 1e-9) return;
  const ux = dx / len;
  const uy = dy / len;
  const head = Math.min(6, len / 3);
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y1);
  ctx.moveTo(x1, y1);
  ctx.lineTo(x1 - head * (ux + 0.5 * uy), y1 - head * (uy - 0.5 * ux));
  ctx.moveTo(x1, y1);
  ctx.lineTo(x1 - head * (ux - 0.5 * uy), y1 - head * (uy + 0.5 * ux));
  ctx.stroke();
}

function drawObject(ctx: Ctx2D, snap: Snapshot, camera: Camera): void {
  const [ox, oy, theta] = snap.object.pose;
  const s = snap.object.shape;
  ctx.strokeStyle = "#222222";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  if (s.kind === "disk") {
    const [px, py] = camera.toScreen(ox, oy);
    ctx.arc(px, py, s.radius * camera.scale, 0, 2 * Math.PI);
  } else {
    const corners: [number, number][] =
      s.kind === "box"
        ? [
            [-s.width / 2, -s.height / 2],
            [s.width / 2, -s.height / 2],
            [s.width / 2, s.height / 2],
            [-s.width / 2, s.height / 2],
          ]
        : Array.from({ length: s.n_sides }, (_, k) => {
            const a = (2 * Math.PI * k) / s.n_sides;
            return [s.circumradius * Math.cos(a), s.circumradius * Math.sin(a)];
          });
    corners.forEach(([lx, ly], k) => {
      const wx = ox + lx * Math.cos(theta) - ly * Math.sin(theta);
      const wy = oy + lx * Math.sin(theta) + ly * Math.cos(theta);
      const [px, py] = camera.toScreen(wx, wy);
      if (k === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.closePath();
  }
  ctx.stroke();
}

function drawFingers(ctx: Ctx2D, snap: Snapshot, camera: Camera): void {
  const [ox, oy] = snap.object.pose;
  for (const f of snap.fingers) {
    const [px, py] = camera.toScreen(f.pos[0], f.pos[1]);
    ctx.fillStyle = MODE_COLORS[f.mode] ?? MODE_COLORS.free;
    ctx.beginPath();
    ctx.arc(px, py, f.radius * camera.scale, 0, 2 * Math.PI);
    ctx.fill();
    if (f.f_n > 0) {
      // Arrow from the fingertip toward the object, length linear in F_N.
      const dx = ox - f.pos[0];
      const dy = oy - f.pos[1];
      const n = Math.hypot(dx, dy) || 1;
      const len = forceArrowLength(f.f_n);
      ctx.strokeStyle = FINGER_COLORS[f.id % FINGER_COLORS.length];
      ctx.lineWidth = 2;
      drawArrow(ctx, px, py, px + (dx / n) * len, py - (dy / n) * len);
    }
  }
}

function drawWrench(ctx: Ctx2D, snap: Snapshot, camera: Camera): void {
  const [fx, fy] = snap.applied_wrench;
  if (fx === 0 && fy === 0) return;
  const [px, py] = camera.toScreen(snap.object.pose[0], snap.object.pose[1]);
  ctx.strokeStyle = "#7a2ca0";
  ctx.lineWidth = 3;
  drawArrow(ctx, px, py, px + fx * WRENCH_PX_PER_N, py - fy * WRENCH_PX_PER_N);
}

export function renderScene(
  ctx: Ctx2D,
  width: number,
  height: number,
  view: SessionView,
  camera: Camera,
  nowMs: number
): void {
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, width, height);
  if (!view.snapshot) {
    ctx.fillStyle = "#555555";
    ctx.font = "14px sans-serif";
    ctx.fillText("waiting for snapshots...", 12, 24);
    return;
  }
  drawObject(ctx, view.snapshot, camera);
  drawFingers(ctx, view.snapshot, camera);
  drawWrench(ctx, view.snapshot, camera);
  ctx.fillStyle = "#555555";
  ctx.font = "12px sans-serif";
  ctx.fillText(`tick ${view.snapshot.tick}  t=${view.snapshot.t.toFixed(2)} s`, 12, height - 10);
  if (view.stale(nowMs)) {
    ctx.globalAlpha = 0.75;
    ctx.fillStyle = "#b00020";
    ctx.fillRect(0, 0, width, 28);
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#ffffff";
    ctx.font = "bold 14px sans-serif";
    ctx.fillText("STALE: no snapshot for > 1 s", 12, 19);
  }
}
