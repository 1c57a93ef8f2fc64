/**
 * Canvas/arena coordinate mapping.  The arena (meters) is fitted into the
 * canvas (pixels) preserving aspect ratio, centered with letterboxing.
 */

export interface Point {
  x: number;
  y: number;
}

export class CanvasTransform {
  readonly scale: number; // pixels per meter
  readonly offsetX: number;
  readonly offsetY: number;

  constructor(
    readonly canvasWidth: number,
    readonly canvasHeight: number,
    readonly arenaWidth: number,
    readonly arenaHeight: number,
  ) {
    this.scale = Math.min(canvasWidth / arenaWidth, canvasHeight / arenaHeight);
    this.offsetX = (canvasWidth - arenaWidth * this.scale) / 2;
    this.offsetY = (canvasHeight - arenaHeight * this.scale) / 2;
  }

  toArena(px: number, py: number): Point {
    return {
      x: (px - this.offsetX) / this.scale,
      y: (py - this.offsetY) / this.scale,
    };
  }

  toCanvas(ax: number, ay: number): Point {
    return {
      x: this.offsetX + ax * this.scale,
      y: this.offsetY + ay * this.scale,
    };
  }

  /** Out-of-canvas motion clamps to the arena edge. */
  clampArena(p: Point): Point {
    return {
      x: Math.min(Math.max(p.x, 0), this.arenaWidth),
      y: Math.min(Math.max(p.y, 0), this.arenaHeight),
    };
  }
}
