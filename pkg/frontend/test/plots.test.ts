import { describe, expect, it } from "vitest";

import { panelLayout, renderTraces, timeDomain } from "../src/plots.js";
import { SessionView, TRACE_WINDOW_S } from "../src/view.js";
import { RecordingCtx, makeFinger, makeSnapshot } from "./helpers.js";

function viewWithSamples(n: number, y = 0.5): SessionView {
  const view = new SessionView();
  for (let k = 0; k < n; k++) {
    view.pushSnapshot(makeSnapshot(3 * k, { fingers: [makeFinger(0, { y })] }), k);
  }
  return view;
}

describe("panel layout", () => {
  it("stacks four labeled panels sharing the full width", () => {
    const panels = panelLayout(500, 400);
    expect(panels.length).toBe(4);
    expect(new Set(panels.map((p) => p.x)).size).toBe(1);
    expect(new Set(panels.map((p) => p.width)).size).toBe(1);
    const ys = panels.map((p) => p.y);
    expect([...ys].sort((a, b) => a - b)).toEqual(ys);
    expect(panels.map((p) => p.label)).toEqual(["wrench [N]", "y", "cmd speed [m/s]", "F_N [N]"]);
  });
});

describe("time axis", () => {
  it("covers at most the rolling window, ending at the newest sample", () => {
    const short = viewWithSamples(10);
    expect(timeDomain(short.samples)[0]).toBe(0);
    const long = viewWithSamples(2700); // 90 sim seconds at 30 Hz
    const [t0, t1] = timeDomain(long.samples);
    expect(t1).toBeCloseTo(long.samples[long.samples.length - 1].t, 12);
    expect(t1 - t0).toBeCloseTo(TRACE_WINDOW_S, 12);
  });
});

describe("trace rendering", () => {
  it("draws a constant y as a flat line in the y panel", () => {
    const ctx = new RecordingCtx();
    renderTraces(ctx, 500, 400, viewWithSamples(60, 0.5));
    const panels = panelLayout(500, 400);
    const yPanel = panels[1];
    // Strictly above the panel floor, so the axis frame is excluded.
    const inPanel = (v: number) => v >= yPanel.y && v < yPanel.y + yPanel.height - 1e-6;
    const lineYs = ctx
      .ops("lineTo")
      .map((c) => (c.args as number[])[1])
      .filter(inPanel);
    expect(lineYs.length).toBeGreaterThan(0);
    expect(new Set(lineYs.map((v) => v.toFixed(6))).size).toBe(1);
  });

  it("aligns a wrench pulse with the shared time axis", () => {
    const view = new SessionView();
    for (let k = 0; k < 30; k++) {
      view.pushSnapshot(
        makeSnapshot(3 * k, {
          applied_wrench: k === 15 ? [2, 0, 0] : [0, 0, 0],
          fingers: [makeFinger(0, { y: k >= 15 ? 0.8 : 0.2 })],
        }),
        k
      );
    }
    const ctx = new RecordingCtx();
    renderTraces(ctx, 500, 400, view);
    const panels = panelLayout(500, 400);
    const [t0, t1] = timeDomain(view.samples);
    const tPulse = view.samples[15].t;
    const xExpect = panels[0].x + ((tPulse - t0) / (t1 - t0)) * panels[0].width;
    // The wrench series peaks at the pulse x; find the fx polyline's apex.
    const inA = ctx
      .ops("lineTo")
      .map((c) => c.args as number[])
      .filter(([, y]) => y >= panels[0].y && y <= panels[0].y + panels[0].height);
    const apex = inA.reduce((best, p) => (p[1] < best[1] ? p : best));
    expect(apex[0]).toBeCloseTo(xExpect, 6);
  });

  it("renders an empty view without drawing any series", () => {
    const ctx = new RecordingCtx();
    renderTraces(ctx, 500, 400, new SessionView());
    expect(ctx.ops("fillText").length).toBeGreaterThanOrEqual(4);
  });
});
