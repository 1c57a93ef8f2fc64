/**
 * Bridge wire protocol: JSON text messages over a WebSocket.
 * Server messages carry a gapless `seq` and the session time `t`.
 */

export interface HelloMessage {
  kind: "hello";
  seq: number;
  t: number;
  version: number;
}

export interface StateMessage {
  kind: "state";
  seq: number;
  t: number;
  x: number;
  y: number;
  r: number;
  g: number;
  b: number;
  bright: number;
  phase: string;
  state: string;
  dropped: number;
}

export interface EventMessage {
  kind: "event";
  seq: number;
  t: number;
  event: string;
  shape?: string;
  technique?: string;
  cause?: string;
}

export interface ErrorMessage {
  kind: "error";
  error: string;
}

export type ServerMessage = HelloMessage | StateMessage | EventMessage | ErrorMessage;

export type ClientMessage =
  | { kind: "hello"; version: number }
  | { kind: "touch"; t: number; on: boolean }
  | { kind: "drag"; t: number; dx: number; dy: number }
  | { kind: "config"; key: string; value: string };

export const PROTOCOL_VERSION = 1;

const SERVER_KINDS = new Set(["hello", "state", "event", "error"]);

/** Parse and loosely validate a server frame; null for anything foreign. */
export function parseServerMessage(text: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const kind = (data as { kind?: unknown }).kind;
  if (typeof kind !== "string" || !SERVER_KINDS.has(kind)) return null;
  return data as ServerMessage;
}

/** Pull the vote fraction out of a recognize event's cause field. */
export function confidenceOf(event: EventMessage): number | null {
  const match = /confidence:([0-9.]+)/.exec(event.cause ?? "");
  return match ? Number(match[1]) : null;
}
