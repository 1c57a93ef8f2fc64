/**
 * Round trip against the real backend: spawn the bridge server, draw a
 * circle with synthetic pointer gestures, and watch the recognition land
 * in the view.  Requires the `yolobot` CLI on PATH (pip install -e ..).
 */

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { GestureMapper } from "../src/gesture.js";
import { ClientMessage, ServerMessage, parseServerMessage } from "../src/protocol.js";
import { CanvasTransform } from "../src/transform.js";
import { SessionView, applyServer, initialView } from "../src/view-model.js";

const PORT = 8949;
const URL = `ws://127.0.0.1:${PORT}/ws`;

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 50; attempt++) {
    const ok = await new Promise<boolean>((resolve) => {
      const probe = new WebSocket(URL);
      probe.on("open", () => {
        probe.close();
        resolve(true);
      });
      probe.on("error", () => resolve(false));
    });
    if (ok) return;
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("bridge server did not come up");
}

beforeAll(async () => {
  server = spawn(
    "yolobot",
    ["serve", "--port", String(PORT), "--schedule", "120,30,30"],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill();
});

function circleFrames(tf: CanvasTransform, samples = 57): { x: number; y: number }[] {
  // A pointer-drawn circle, 0.5 m across, centered on the robot's start.
  const frames = [];
  for (let k = 0; k < samples; k++) {
    const a = (2 * Math.PI * k) / (samples - 1);
    const arenaX = 1.0 + 0.25 * Math.cos(a);
    const arenaY = 1.0 + 0.25 * Math.sin(a);
    frames.push(tf.toCanvas(arenaX, arenaY));
  }
  return frames;
}

describe("UI round trip against the live simulator", () => {
  it(
    "press-hold shows the white LED within 200 ms; a drawn circle is recognized",
    async () => {
      const ws = new WebSocket(URL);
      let view: SessionView = initialView("harmonious");
      const inbox: ServerMessage[] = [];
      ws.on("message", (data) => {
        const msg = parseServerMessage(String(data));
        if (msg) {
          inbox.push(msg);
          view = applyServer(view, msg);
        }
      });
      await new Promise((resolve) => ws.on("open", resolve));
      const send = (msg: ClientMessage) => ws.send(JSON.stringify(msg));
      send({ kind: "hello", version: 1 });

      const tf = new CanvasTransform(640, 640, 2, 2);
      const gestures = new GestureMapper(tf);
      const frames = circleFrames(tf);

      // Pointer down at the start of the stroke: touch goes on.
      let nowMs = 0;
      for (const msg of gestures.down(nowMs, frames[0].x, frames[0].y)) send(msg);

      // Within 200 ms the robot must show the white touch override.
      await new Promise((r) => setTimeout(r, 200));
      expect(view.state).toBe("touched");
      expect([view.led.r, view.led.g, view.led.b]).toEqual([255, 255, 255]);

      // Trace the circle at display rate (~60 Hz frames over ~2.8 s).
      const frameInterval = 2800 / frames.length;
      for (const frame of frames.slice(1)) {
        nowMs += frameInterval;
        for (const msg of gestures.move(nowMs, frame.x, frame.y)) send(msg);
        await new Promise((r) => setTimeout(r, frameInterval));
      }
      nowMs += frameInterval;
      const releaseWallMs = Date.now();
      for (const msg of gestures.up(nowMs, frames[0].x, frames[0].y)) send(msg);

      // The recognition must reach the feed within the 3 s segmentation
      // window plus one second of slack.
      while (view.lastRecognized === null) {
        if (Date.now() - releaseWallMs > 4000) {
          throw new Error("no recognition within window + 1 s");
        }
        await new Promise((r) => setTimeout(r, 50));
      }
      expect(view.lastRecognized!.shape).toBe("circle");
      expect(view.feed.some((e) => e.text.includes("circle"))).toBe(true);

      // The mirror response follows; replaying the log reproduces the view.
      const replayed = inbox.reduce(applyServer, initialView("harmonious"));
      expect(replayed).toEqual(view);
      ws.close();
    },
    30_000,
  );
});
