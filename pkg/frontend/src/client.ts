// WebSocket client: sends command envelopes, surfaces snapshots, and queues
// outgoing commands while disconnected so controls keep working during a
// reconnect.

import { CommandBody, Envelope, commandEnvelope } from "./protocol.js";

export interface ClientCallbacks {
  onSnapshot: (snapshot: Envelope) => void;
  onHello?: (hello: Envelope) => void;
  onError?: (error: Envelope) => void;
  onConnectionChange?: (connected: boolean) => void;
}

export class EngineClient {
  private ws: WebSocket | null = null;
  private seq = 0;
  private queue: CommandBody[] = [];
  connected = false;

  constructor(private url: string, private callbacks: ClientCallbacks) {}

  connect(): void {
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.connected = true;
      this.callbacks.onConnectionChange?.(true);
      const pending = this.queue.splice(0);
      for (const body of pending) this.send(body);
    };
    ws.onclose = () => {
      this.connected = false;
      this.callbacks.onConnectionChange?.(false);
      setTimeout(() => this.connect(), 1000);
    };
    ws.onmessage = (msg) => {
      const env = JSON.parse(msg.data as string) as Envelope;
      if (env.type === "snapshot") this.callbacks.onSnapshot(env);
      else if (env.type === "hello") this.callbacks.onHello?.(env);
      else if (env.type === "error") this.callbacks.onError?.(env);
    };
  }

  send(body: CommandBody): void {
    if (!this.connected || !this.ws) {
      this.queue.push(body);
      return;
    }
    this.seq += 1;
    this.ws.send(JSON.stringify(commandEnvelope(this.seq, body)));
  }
}

export function defaultUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/ws`;
}
