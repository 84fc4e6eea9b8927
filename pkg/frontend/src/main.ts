// Browser entry: wire the websocket client, gesture handling and the two
// canvases. Configuration comes from the page query (?host=...&port=...).

import { SessionClient, sessionUrl } from "./client.js";
import { DRAG_GAIN_N_PER_PX, GestureController } from "./gestures.js";
import { Camera, renderScene } from "./render.js";
import { renderTraces } from "./plots.js";
import { InteractionMode } from "./view.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function main(): void {
  const scene = byId<HTMLCanvasElement>("scene");
  const traces = byId<HTMLCanvasElement>("traces");
  const status = byId<HTMLSpanElement>("status");
  const fpsLabel = byId<HTMLSpanElement>("fps");
  const modeSelect = byId<HTMLSelectElement>("mode");
  const gainInput = byId<HTMLInputElement>("gain");
  gainInput.value = String(DRAG_GAIN_N_PER_PX);

  const socket = new WebSocket(sessionUrl(window.location.search));
  const client = new SessionClient(socket);
  const view = client.view;
  client.onError = (err) => {
    status.textContent = `error: ${err.message}`;
  };

  const gestures = new GestureController((cmd) => {
    void client.send(cmd);
  });
  gainInput.addEventListener("change", () => {
    const g = Number(gainInput.value);
    if (Number.isFinite(g) && g > 0) gestures.gain = g;
  });
  modeSelect.addEventListener("change", () => {
    view.mode = modeSelect.value as InteractionMode;
  });

  const camera = new Camera(1400, scene.width / 2, scene.height * 0.45);
  const canvasXY = (e: PointerEvent): [number, number] => {
    const rect = scene.getBoundingClientRect();
    return [e.clientX - rect.left, e.clientY - rect.top];
  };
  scene.addEventListener("pointerdown", (e) => {
    const [x, y] = canvasXY(e);
    gestures.pointerDown(view.snapshot, camera, view.mode, x, y, performance.now());
  });
  scene.addEventListener("pointermove", (e) => {
    const [x, y] = canvasXY(e);
    gestures.pointerMove(x, y);
  });
  scene.addEventListener("pointerup", (e) => {
    const [x, y] = canvasXY(e);
    gestures.pointerUp(x, y, performance.now());
  });

  byId<HTMLButtonElement>("pause").addEventListener("click", () => void client.send({ type: "pause" }));
  byId<HTMLButtonElement>("resume").addEventListener("click", () => void client.send({ type: "resume" }));
  byId<HTMLButtonElement>("reset").addEventListener("click", () => void client.send({ type: "reset" }));

  const sceneCtx = scene.getContext("2d")!;
  const traceCtx = traces.getContext("2d")!;
  let frames = 0;
  let fpsAt = performance.now();
  function frame(): void {
    const now = performance.now();
    renderScene(sceneCtx, scene.width, scene.height, view, camera, now);
    renderTraces(traceCtx, traces.width, traces.height, view);
    status.textContent = view.status + (view.hello ? ` (seed ${view.hello.seed})` : "");
    frames++;
    if (now - fpsAt >= 1000) {
      fpsLabel.textContent = `${((frames * 1000) / (now - fpsAt)).toFixed(0)} fps`;
      frames = 0;
      fpsAt = now;
    }
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
