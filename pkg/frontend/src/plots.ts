// Trace panels: four stacked time-series sharing one time axis, drawn from
// the view's rolling 60 s buffers. Panel A applied wrench, B integrator y
// per finger, C command speed per finger, D normal force per finger.

import { Ctx2D, FINGER_COLORS } from "./render.js";
import { SessionView, TRACE_WINDOW_S, TraceSample } from "./view.js";

export interface Panel {
  label: string;
  x: number;
  y: number;
  width: number;
  height: number;
}

const MARGIN = { left: 44, right: 8, top: 16, gap: 10, bottom: 18 };

/** Split the drawing area into four stacked panels. */
export function panelLayout(width: number, height: number): Panel[] {
  const labels = ["wrench [N]", "y", "cmd speed [m/s]", "F_N [N]"];
  const inner = height - MARGIN.top - MARGIN.bottom - 3 * MARGIN.gap;
  const h = inner / 4;
  return labels.map((label, k) => ({
    label,
    x: MARGIN.left,
    y: MARGIN.top + k * (h + MARGIN.gap),
    width: width - MARGIN.left - MARGIN.right,
    height: h,
  }));
}

/** Shared time axis: the latest TRACE_WINDOW_S seconds. */
export function timeDomain(samples: TraceSample[]): [number, number] {
  const tMax = samples.length ? samples[samples.length - 1].t : 0;
  return [Math.max(0, tMax - TRACE_WINDOW_S), Math.max(tMax, 1e-9)];
}

function valueDomain(values: number[]): [number, number] {
  let lo = Math.min(0, ...values);
  let hi = Math.max(...values);
  if (hi - lo < 1e-9) hi = lo + 1;
  return [lo, hi];
}

function drawSeries(
  ctx: Ctx2D,
  panel: Panel,
  samples: TraceSample[],
  tDomain: [number, number],
  vDomain: [number, number],
  pick: (s: TraceSample) => number,
  color: string
): void {
  const [t0, t1] = tDomain;
  const [v0, v1] = vDomain;
  ctx.strokeStyle = color;
  ctx.lineWidth = 1;
  ctx.beginPath();
  samples.forEach((s, k) => {
    const x = panel.x + ((s.t - t0) / (t1 - t0)) * panel.width;
    const y = panel.y + panel.height - ((pick(s) - v0) / (v1 - v0)) * panel.height;
    if (k === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

export function renderTraces(ctx: Ctx2D, width: number, height: number, view: SessionView): void {
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, width, height);
  const panels = panelLayout(width, height);
  const samples = view.samples;
  const tDomain = timeDomain(samples);
  const nFingers = samples.length ? samples[samples.length - 1].y.length : 0;

  const perPanel: Array<{ picks: Array<(s: TraceSample) => number>; colors: string[] }> = [
    {
      picks: [0, 1, 2].map((k) => (s: TraceSample) => s.wrench[k]),
      colors: ["#7a2ca0", "#b085c9", "#4a4a4a"],
    },
    {
      picks: Array.from({ length: nFingers }, (_, i) => (s: TraceSample) => s.y[i]),
      colors: FINGER_COLORS,
    },
    {
      picks: Array.from({ length: nFingers }, (_, i) => (s: TraceSample) => s.speed[i]),
      colors: FINGER_COLORS,
    },
    {
      picks: Array.from({ length: nFingers }, (_, i) => (s: TraceSample) => s.fn[i]),
      colors: FINGER_COLORS,
    },
  ];

  panels.forEach((panel, p) => {
    ctx.strokeStyle = "#cccccc";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(panel.x, panel.y);
    ctx.lineTo(panel.x, panel.y + panel.height);
    ctx.lineTo(panel.x + panel.width, panel.y + panel.height);
    ctx.stroke();
    ctx.fillStyle = "#333333";
    ctx.font = "11px sans-serif";
    ctx.fillText(panel.label, 2, panel.y + 10);
    if (!samples.length) return;
    const { picks, colors } = perPanel[p];
    const all = samples.flatMap((s) => picks.map((pick) => pick(s)));
    const vDomain = valueDomain(all);
    picks.forEach((pick, k) =>
      drawSeries(ctx, panel, samples, tDomain, vDomain, pick, colors[k % colors.length])
    );
  });
  if (samples.length) {
    ctx.fillStyle = "#333333";
    ctx.font = "11px sans-serif";
    const last = panels[panels.length - 1];
    ctx.fillText(`${tDomain[0].toFixed(1)} s`, last.x, height - 4);
    ctx.fillText(`${tDomain[1].toFixed(1)} s`, last.x + last.width - 36, height - 4);
  }
}
