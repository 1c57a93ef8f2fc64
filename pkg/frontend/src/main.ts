/**
 * Play surface wiring: canvas, pointer capture, profile switcher, status
 * badges, event feed, reconnect banner.
 */

import { BridgeClient } from "./client.js";
import { GestureMapper } from "./gesture.js";
import { draw, ledCss } from "./render.js";
import { CanvasTransform } from "./transform.js";
import {
  SessionView,
  applyServer,
  initialView,
  noteConnection,
  noteProfileSelected,
} from "./view-model.js";

const ARENA_W = 2.0;
const ARENA_H = 2.0;
const DEFAULT_URL = `ws://${location.hostname || "127.0.0.1"}:8765/ws`;

const canvas = document.getElementById("arena") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const tf = new CanvasTransform(canvas.width, canvas.height, ARENA_W, ARENA_H);

const banner = document.getElementById("banner")!;
const phaseBadge = document.getElementById("phase")!;
const stateBadge = document.getElementById("state")!;
const swatch = document.getElementById("swatch")!;
const recognizedLabel = document.getElementById("recognized")!;
const feedList = document.getElementById("feed")!;
const profileSelect = document.getElementById("profile") as HTMLSelectElement;
const touchToggle = document.getElementById("touch-toggle") as HTMLInputElement;

let view: SessionView = initialView(profileSelect.value);
let dirty = true;

function update(next: SessionView): void {
  view = next;
  dirty = true;
}

const client = new BridgeClient(DEFAULT_URL, {
  onMessage: (msg) => update(applyServer(view, msg)),
  onConnected: () => update(noteConnection(view, true)),
  onDisconnected: () => update(noteConnection(view, false)),
});
client.connect();

const gestures = new GestureMapper(tf);

function sendAll(messages: ReturnType<GestureMapper["move"]>): void {
  for (const msg of messages) client.send(msg);
}

canvas.addEventListener("pointerdown", (e) => {
  canvas.setPointerCapture(e.pointerId);
  sendAll(gestures.down(performance.now(), e.offsetX, e.offsetY));
});
canvas.addEventListener("pointermove", (e) => {
  sendAll(gestures.move(performance.now(), e.offsetX, e.offsetY));
});
canvas.addEventListener("pointerup", (e) => {
  sendAll(gestures.up(performance.now(), e.offsetX, e.offsetY));
});
canvas.addEventListener("pointercancel", (e) => {
  sendAll(gestures.up(performance.now(), e.offsetX, e.offsetY));
});

profileSelect.addEventListener("change", () => {
  client.send({ kind: "config", key: "profile", value: profileSelect.value });
  update(noteProfileSelected(view, profileSelect.value));
});

touchToggle.addEventListener("change", () => {
  client.send({ kind: "touch", t: view.t, on: touchToggle.checked });
});

function renderDom(): void {
  banner.classList.toggle("hidden", view.connected);
  phaseBadge.textContent = view.phase;
  phaseBadge.dataset.phase = view.phase;
  stateBadge.textContent = view.state;
  stateBadge.dataset.state = view.state;
  swatch.style.backgroundColor = ledCss(view);
  recognizedLabel.textContent = view.lastRecognized
    ? `${view.lastRecognized.shape}` +
      (view.lastRecognized.confidence !== null
        ? ` (${Math.round(view.lastRecognized.confidence * 100)}%)`
        : "")
    : "—";
  const entries = view.feed.slice(0, 14);
  feedList.replaceChildren(
    ...entries.map((entry) => {
      const li = document.createElement("li");
      li.textContent = `t=${entry.t.toFixed(1)}s  ${entry.text}`;
      if (entry.technique) li.dataset.technique = entry.technique;
      return li;
    }),
  );
}

function frame(): void {
  if (dirty) {
    dirty = false;
    draw(ctx, view, tf);
    renderDom();
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
