// Thin websocket wrapper with reconnect.

import { decodeServerMessage, encode, type ServerMessage } from "./protocol.js";

export class Connection {
  private ws: WebSocket | null = null;
  private closed = false;

  onmessage: (msg: ServerMessage) => void = () => {};
  onstatus: (connected: boolean) => void = () => {};

  constructor(private url: string) {}

  open(): void {
    this.closed = false;
    this.dial();
  }

  private dial(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => this.onstatus(true);
    ws.onmessage = (event) => {
      try {
        this.onmessage(decodeServerMessage(String(event.data)));
      } catch (err) {
        console.warn("dropping frame:", err);
      }
    };
    ws.onclose = () => {
      this.onstatus(false);
      if (!this.closed) {
        setTimeout(() => this.dial(), 1000);
      }
    };
    ws.onerror = () => ws.close();
  }

  send(msg: unknown): boolean {
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(encode(msg));
    return true;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
