import { describe, expect, it } from "vitest";

import { CanvasTransform } from "../src/transform.js";

describe("CanvasTransform", () => {
  it("letterboxes a wide canvas around a square arena", () => {
    const tf = new CanvasTransform(800, 600, 2, 2);
    expect(tf.scale).toBe(300); // limited by height
    expect(tf.offsetX).toBe(100);
    expect(tf.offsetY).toBe(0);
  });

  it("round-trips canvas and arena coordinates", () => {
    const tf = new CanvasTransform(640, 480, 2, 1.5);
    const arena = tf.toArena(321, 123);
    const back = tf.toCanvas(arena.x, arena.y);
    expect(back.x).toBeCloseTo(321, 9);
    expect(back.y).toBeCloseTo(123, 9);
  });

  it("preserves aspect ratio", () => {
    const tf = new CanvasTransform(1000, 500, 2, 2);
    const a = tf.toCanvas(0, 0);
    const b = tf.toCanvas(2, 2);
    expect(b.x - a.x).toBeCloseTo(b.y - a.y, 9);
  });

  it("clamps out-of-arena points to the edge", () => {
    const tf = new CanvasTransform(640, 640, 2, 2);
    expect(tf.clampArena({ x: -0.5, y: 1 })).toEqual({ x: 0, y: 1 });
    expect(tf.clampArena({ x: 2.5, y: 3 })).toEqual({ x: 2, y: 2 });
  });
});
