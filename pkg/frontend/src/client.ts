/**
 * WebSocket wrapper for the bridge: hello handshake on open, JSON encode/
 * decode, and exponential-backoff reconnection.
 */

import { ClientMessage, PROTOCOL_VERSION, ServerMessage, parseServerMessage } from "./protocol.js";

export interface BridgeHandlers {
  onMessage(msg: ServerMessage): void;
  onConnected(): void;
  onDisconnected(): void;
}

export class BridgeClient {
  private ws: WebSocket | null = null;
  private attempts = 0;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly handlers: BridgeHandlers,
  ) {}

  connect(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.attempts = 0;
      this.send({ kind: "hello", version: PROTOCOL_VERSION });
      this.handlers.onConnected();
    };
    this.ws.onmessage = (event: MessageEvent) => {
      const msg = parseServerMessage(String(event.data));
      if (msg) this.handlers.onMessage(msg);
    };
    this.ws.onclose = () => {
      this.handlers.onDisconnected();
      if (!this.closed) this.scheduleReconnect();
    };
    this.ws.onerror = () => {
      // onclose follows; nothing to do here.
    };
  }

  private scheduleReconnect(): void {
    const delay = Math.min(500 * 2 ** this.attempts, 10_000);
    this.attempts += 1;
    setTimeout(() => {
      if (!this.closed) this.connect();
    }, delay);
  }

  send(msg: ClientMessage): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(msg));
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
