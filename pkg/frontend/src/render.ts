/**
 * Canvas painting: arena, fading motion trail, and the robot with its
 * current LED color.  Pure draw-from-view; no state of its own.
 */

import { CanvasTransform } from "./transform.js";
import { SessionView } from "./view-model.js";

const TRAIL_FADE_SECONDS = 6;

export function ledCss(view: SessionView): string {
  const { r, g, b, bright } = view.led;
  return `rgb(${Math.round(r * bright)}, ${Math.round(g * bright)}, ${Math.round(b * bright)})`;
}

export function draw(
  ctx: CanvasRenderingContext2D,
  view: SessionView,
  tf: CanvasTransform,
): void {
  ctx.clearRect(0, 0, tf.canvasWidth, tf.canvasHeight);

  // Letterboxed arena.
  ctx.fillStyle = "#11131a";
  ctx.fillRect(0, 0, tf.canvasWidth, tf.canvasHeight);
  const corner = tf.toCanvas(0, 0);
  ctx.fillStyle = "#1c2030";
  ctx.fillRect(corner.x, corner.y, tf.arenaWidth * tf.scale, tf.arenaHeight * tf.scale);
  ctx.strokeStyle = "#3a4566";
  ctx.strokeRect(corner.x, corner.y, tf.arenaWidth * tf.scale, tf.arenaHeight * tf.scale);

  // Fading trail (no growth while disconnected: the view is frozen).
  for (const p of view.trail) {
    const age = view.t - p.t;
    if (age > TRAIL_FADE_SECONDS) continue;
    const alpha = Math.max(0, 1 - age / TRAIL_FADE_SECONDS) * 0.5;
    const c = tf.toCanvas(p.x, p.y);
    ctx.fillStyle = `rgba(120, 160, 255, ${alpha.toFixed(3)})`;
    ctx.beginPath();
    ctx.arc(c.x, c.y, 2.5, 0, Math.PI * 2);
    ctx.fill();
  }

  // The robot, lit by its LEDs.
  if (view.robot) {
    const c = tf.toCanvas(view.robot.x, view.robot.y);
    const radius = Math.max(8, 0.05 * tf.scale);
    ctx.beginPath();
    ctx.arc(c.x, c.y, radius, 0, Math.PI * 2);
    ctx.fillStyle = ledCss(view);
    ctx.fill();
    ctx.lineWidth = 2;
    ctx.strokeStyle = view.state === "touched" ? "#ffffff" : "#7a87b3";
    ctx.stroke();
  }
}
