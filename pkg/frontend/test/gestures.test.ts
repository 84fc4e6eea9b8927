import { describe, expect, it } from "vitest";

import {
  DRAG_GAIN_N_PER_PX,
  GestureController,
  WRENCH_CLAMP_N,
  dragToOverride,
  dragToWrench,
  hitTest,
} from "../src/gestures.js";
import { Command, WrenchCommand } from "../src/protocol.js";
import { Camera } from "../src/render.js";
import { makeSnapshot } from "./helpers.js";

const camera = new Camera(1000, 250, 250);

function collector(): { cmds: Command[]; send: (c: Command) => void } {
  const cmds: Command[] = [];
  return { cmds, send: (c) => cmds.push(c) };
}

describe("dragToWrench", () => {
  it("applies the documented gain: 10 px right is 0.5 N along +x", () => {
    const cmd = dragToWrench(10, 0, 0.2)!;
    expect(cmd.fx).toBeCloseTo(10 * DRAG_GAIN_N_PER_PX, 12);
    expect(cmd.fx).toBeCloseTo(0.5, 12);
    expect(cmd.fy).toBe(0);
    expect(cmd.tau).toBe(0);
  });

  it("flips screen-down to world-down force", () => {
    const cmd = dragToWrench(0, 20, 0.2)!;
    expect(cmd.fy).toBeCloseTo(-1.0, 12);
  });

  it("clamps the magnitude to 5 N, preserving direction", () => {
    const cmd = dragToWrench(300, -400, 0.2)!;
    expect(Math.hypot(cmd.fx, cmd.fy)).toBeCloseTo(WRENCH_CLAMP_N, 9);
    expect(cmd.fy / cmd.fx).toBeCloseTo(400 / 300, 9);
  });

  it("returns null for a zero-length drag", () => {
    expect(dragToWrench(0, 0, 1.0)).toBeNull();
  });

  it("uses the hold time as the wrench duration", () => {
    expect(dragToWrench(10, 0, 0.42)!.duration).toBeCloseTo(0.42, 12);
    expect(dragToWrench(10, 0, 0)!.duration).toBeGreaterThan(0);
  });
});

describe("hit testing", () => {
  const snap = makeSnapshot(0);

  it("finds the object at its center and misses far away", () => {
    expect(hitTest(snap, camera, 250, 250)).toEqual({ kind: "object" });
    expect(hitTest(snap, camera, 50, 50)).toBeNull();
  });

  it("finds a finger at its screen position", () => {
    const f = snap.fingers[0];
    const [px, py] = camera.toScreen(f.pos[0], f.pos[1]);
    expect(hitTest(snap, camera, px, py)).toEqual({ kind: "finger", id: 0 });
  });
});

describe("gesture state machine", () => {
  it("emits exactly one wrench per object drag", () => {
    const { cmds, send } = collector();
    const g = new GestureController(send);
    g.pointerDown(makeSnapshot(0), camera, "perturb-object", 250, 250, 0);
    g.pointerUp(270, 250, 500);
    expect(cmds.length).toBe(1);
    const w = cmds[0] as WrenchCommand;
    expect(w.type).toBe("wrench");
    expect(w.fx).toBeCloseTo(20 * DRAG_GAIN_N_PER_PX, 12);
    expect(w.duration).toBeCloseTo(0.5, 12);
    // A later stray pointer-up emits nothing.
    g.pointerUp(280, 250, 600);
    expect(cmds.length).toBe(1);
  });

  it("emits nothing for a zero-length drag or a miss", () => {
    const { cmds, send } = collector();
    const g = new GestureController(send);
    g.pointerDown(makeSnapshot(0), camera, "perturb-object", 250, 250, 0);
    g.pointerUp(250, 250, 100);
    g.pointerDown(makeSnapshot(0), camera, "perturb-object", 10, 10, 0);
    g.pointerUp(60, 10, 100);
    expect(cmds).toEqual([]);
  });

  it("streams overrides while a finger is held, then releases exactly once", () => {
    const snap = makeSnapshot(0);
    const [px, py] = camera.toScreen(snap.fingers[1].pos[0], snap.fingers[1].pos[1]);
    const { cmds, send } = collector();
    const g = new GestureController(send);
    g.pointerDown(snap, camera, "drag-finger", px, py, 0);
    g.pointerMove(px + 10, py);
    g.pointerMove(px + 20, py);
    g.pointerUp(px + 20, py, 300);
    g.pointerUp(px + 20, py, 400);
    const types = cmds.map((c) => c.type);
    expect(types).toEqual(["override", "override", "release"]);
    expect(cmds.every((c) => "finger" in c && c.finger === 1)).toBe(true);
  });

  it("observe mode ignores all pointer input", () => {
    const { cmds, send } = collector();
    const g = new GestureController(send);
    g.pointerDown(makeSnapshot(0), camera, "observe", 250, 250, 0);
    g.pointerMove(270, 250);
    g.pointerUp(270, 250, 100);
    expect(cmds).toEqual([]);
  });
});

describe("dragToOverride", () => {
  it("maps pixel offset to a clamped velocity", () => {
    const cmd = dragToOverride(2, 40, -40);
    expect(cmd.type).toBe("override");
    if (cmd.type === "override") {
      expect(cmd.vx).toBeCloseTo(0.02, 12);
      expect(cmd.vy).toBeCloseTo(0.02, 12);
    }
    const big = dragToOverride(0, 10000, 0);
    if (big.type === "override") expect(Math.hypot(big.vx, big.vy)).toBeCloseTo(0.05, 9);
  });
});
