/**
 * The session view is a pure projection of the bridge message stream: no
 * client-side simulation, no hidden state.  Replaying the same messages
 * through `applyServer` reproduces the identical view.
 */

import { ServerMessage, EventMessage, confidenceOf } from "./protocol.js";

export interface FeedEntry {
  t: number;
  text: string;
  technique?: string;
}

export interface TrailPoint {
  x: number;
  y: number;
  t: number;
}

export interface SessionView {
  connected: boolean;
  t: number;
  robot: { x: number; y: number } | null;
  led: { r: number; g: number; b: number; bright: number };
  phase: string;
  state: string;
  profile: string;
  lastRecognized: { shape: string; confidence: number | null } | null;
  feed: FeedEntry[]; // newest first
  trail: TrailPoint[]; // oldest first
  dropped: number;
  seqGap: boolean;
  lastSeq: number;
  error: string | null;
}

export const FEED_LIMIT = 40;
export const TRAIL_LIMIT = 240;

export function initialView(profile: string): SessionView {
  return {
    connected: false,
    t: 0,
    robot: null,
    led: { r: 0, g: 0, b: 0, bright: 0 },
    phase: "rising",
    state: "idle",
    profile,
    lastRecognized: null,
    feed: [],
    trail: [],
    dropped: 0,
    seqGap: false,
    lastSeq: -1,
    error: null,
  };
}

function feedText(ev: EventMessage): string | null {
  switch (ev.event) {
    case "recognize": {
      const conf = confidenceOf(ev);
      const pct = conf === null ? "" : ` (${Math.round(conf * 100)}% of votes)`;
      return `recognized ${ev.shape}${pct}`;
    }
    case "execute":
      if (ev.technique) return `${ev.technique} → ${ev.shape}`;
      return `self-initiated → ${ev.shape}`;
    case "touch":
      return "touch";
    case "release":
      return "release";
    case "complete":
      return "movement complete";
    case "arc":
      return `arc → ${ev.cause}`;
    case "observe":
      return null; // too chatty for the feed
    default:
      return ev.event;
  }
}

function pushFeed(view: SessionView, entry: FeedEntry): void {
  view.feed = [entry, ...view.feed].slice(0, FEED_LIMIT);
}

/** Fold one server message into the view; returns a new view object. */
export function applyServer(view: SessionView, msg: ServerMessage): SessionView {
  const next: SessionView = { ...view };
  if (msg.kind !== "error") {
    if (next.lastSeq >= 0 && msg.seq !== next.lastSeq + 1) {
      next.seqGap = true;
    }
    next.lastSeq = msg.seq;
  }
  switch (msg.kind) {
    case "hello":
      break;
    case "state": {
      next.t = msg.t;
      next.robot = { x: msg.x, y: msg.y };
      next.led = { r: msg.r, g: msg.g, b: msg.b, bright: msg.bright };
      next.phase = msg.phase;
      next.state = msg.state;
      next.dropped = msg.dropped;
      const last = view.trail[view.trail.length - 1];
      if (!last || last.x !== msg.x || last.y !== msg.y) {
        next.trail = [...view.trail, { x: msg.x, y: msg.y, t: msg.t }].slice(
          -TRAIL_LIMIT,
        );
      }
      break;
    }
    case "event": {
      next.t = msg.t;
      if (msg.event === "recognize" && msg.shape) {
        next.lastRecognized = { shape: msg.shape, confidence: confidenceOf(msg) };
      }
      const text = feedText(msg);
      if (text !== null) {
        pushFeed(next, { t: msg.t, text, technique: msg.technique });
      }
      break;
    }
    case "error":
      next.error = msg.error;
      break;
  }
  return next;
}

export function noteConnection(view: SessionView, connected: boolean): SessionView {
  // A frozen view on disconnect: nothing is cleared, only the flag flips.
  return { ...view, connected };
}

export function noteProfileSelected(view: SessionView, profile: string): SessionView {
  return { ...view, profile };
}
