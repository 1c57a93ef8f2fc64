/**
 * Pointer gestures to bridge messages.
 *
 * Pointer-down sends `touch on`; movement is sampled at display rate but
 * decimated to one `drag` delta per simulator tick (50 ms); pointer-up
 * flushes the remainder and sends `touch off`.  Coordinates are mapped
 * canvas to arena meters, clamping out-of-canvas motion to the arena edge.
 */

import { ClientMessage } from "./protocol.js";
import { CanvasTransform, Point } from "./transform.js";

export const DECIMATE_MS = 50;

export class GestureMapper {
  private active = false;
  private lastSent: Point | null = null; // arena coords of last flushed sample
  private pending: Point | null = null; // latest arena position not yet sent
  private lastFlushMs = 0;

  constructor(private readonly transform: CanvasTransform) {}

  private arenaPoint(px: number, py: number): Point {
    return this.transform.clampArena(this.transform.toArena(px, py));
  }

  private flush(t: number): ClientMessage | null {
    if (!this.pending || !this.lastSent) return null;
    const dx = this.pending.x - this.lastSent.x;
    const dy = this.pending.y - this.lastSent.y;
    if (dx === 0 && dy === 0) return null;
    this.lastSent = this.pending;
    this.pending = null;
    return { kind: "drag", t, dx, dy };
  }

  down(nowMs: number, px: number, py: number): ClientMessage[] {
    this.active = true;
    this.lastSent = this.arenaPoint(px, py);
    this.pending = null;
    this.lastFlushMs = nowMs;
    return [{ kind: "touch", t: nowMs / 1000, on: true }];
  }

  move(nowMs: number, px: number, py: number): ClientMessage[] {
    if (!this.active) return [];
    this.pending = this.arenaPoint(px, py);
    if (nowMs - this.lastFlushMs < DECIMATE_MS) return [];
    this.lastFlushMs = nowMs;
    const msg = this.flush(nowMs / 1000);
    return msg ? [msg] : [];
  }

  up(nowMs: number, px: number, py: number): ClientMessage[] {
    if (!this.active) return [];
    this.active = false;
    this.pending = this.arenaPoint(px, py);
    const out: ClientMessage[] = [];
    const msg = this.flush(nowMs / 1000);
    if (msg) out.push(msg);
    out.push({ kind: "touch", t: nowMs / 1000, on: false });
    this.lastSent = null;
    return out;
  }
}
