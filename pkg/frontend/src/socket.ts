// Thin WebSocket wrapper: parses server JSON, forwards typed events,
// exposes a typed send. Reconnection is deliberately manual (the owner
// socket is the steering handle; silently reconnecting would create a
// fresh read-only identity).

import type { ClientMessage, UiEvent } from "./protocol.js";
import { isServerMessage } from "./protocol.js";

export class SteeringSocket {
  private socket: WebSocket | null = null;

  constructor(private readonly onEvent: (event: UiEvent) => void) {}

  connect(url: string): void {
    this.close();
    const socket = new WebSocket(url);
    this.socket = socket;
    socket.onopen = () => this.onEvent({ type: "connected" });
    socket.onclose = () => {
      if (this.socket === socket) {
        this.socket = null;
        this.onEvent({ type: "disconnected" });
      }
    };
    socket.onmessage = (raw) => {
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(raw.data));
      } catch {
        return;
      }
      if (isServerMessage(parsed)) this.onEvent(parsed);
    };
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === WebSocket.OPEN;
  }

  send(message: ClientMessage): boolean {
    if (!this.connected) return false;
    this.socket!.send(JSON.stringify(message));
    return true;
  }

  close(): void {
    const socket = this.socket;
    this.socket = null;
    socket?.close();
  }
}

export function defaultSocketUrl(loc: {
  protocol: string;
  host: string;
}): string {
  const scheme = loc.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${loc.host}/ws`;
}
