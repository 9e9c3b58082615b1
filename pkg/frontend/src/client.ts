// Session client: strict request-response over a line transport.
// At most one message is in flight; frame cadence is whatever the caller
// achieves by awaiting each render before sending the next frame.

import {
  PROTOCOL_VERSION,
  RenderPayload,
  ServerMessage,
  WelcomePayload,
  decodeLine,
  encodeLine,
} from "./protocol.js";
import { Transport } from "./transport.js";

export type ConnectionStatus = "idle" | "live" | "closed" | "failed";

export interface ViewState {
  status: ConnectionStatus;
  lastRender: RenderPayload | null;
  glyphs: string[];
  rate: number;
  crosshairX: number;
  errorMessage: string | null;
}

export class SessionClient {
  readonly state: ViewState = {
    status: "idle",
    lastRender: null,
    glyphs: [],
    rate: 0,
    crosshairX: 0.5,
    errorMessage: null,
  };
  private transport: Transport;
  private pending: {
    resolve: (msg: ServerMessage) => void;
    reject: (err: Error) => void;
  } | null = null;

  constructor(transport: Transport) {
    this.transport = transport;
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => {
      if (this.state.status === "live") {
        this.state.status = "closed";
        this.state.errorMessage = this.state.errorMessage ?? "connection lost";
      }
      this.pending?.reject(new Error("connection closed"));
      this.pending = null;
    });
  }

  private handleLine(line: string): void {
    let msg: ServerMessage;
    try {
      msg = decodeLine(line);
    } catch (err) {
      this.state.status = "failed";
      this.state.errorMessage = String(err);
      this.pending?.reject(err as Error);
      this.pending = null;
      return;
    }
    if (msg.verb === "error") {
      this.state.status = "failed";
      this.state.errorMessage = msg.payload.message;
      this.pending?.reject(new Error(msg.payload.message));
      this.pending = null;
      return;
    }
    const pending = this.pending;
    this.pending = null;
    pending?.resolve(msg);
  }

  private request(verb: string, payload: unknown): Promise<ServerMessage> {
    if (this.pending) {
      return Promise.reject(new Error("a request is already in flight"));
    }
    return new Promise((resolve, reject) => {
      this.pending = { resolve, reject };
      this.transport.send(encodeLine(verb, payload));
    });
  }

  get busy(): boolean {
    return this.pending !== null;
  }

  async hello(): Promise<WelcomePayload> {
    const msg = await this.request("hello", { protocol_version: PROTOCOL_VERSION });
    if (msg.verb !== "welcome") throw new Error(`expected welcome, got ${msg.verb}`);
    this.state.status = "live";
    this.state.glyphs = msg.payload.glyphs;
    this.state.rate = msg.payload.params.rate;
    this.state.crosshairX = msg.payload.params.crosshair_x;
    return msg.payload;
  }

  async frame(x: number, y: number, dt: number): Promise<RenderPayload> {
    const msg = await this.request("frame", { x, y, dt });
    if (msg.verb !== "render") throw new Error(`expected render, got ${msg.verb}`);
    this.state.lastRender = msg.payload;
    this.state.rate = msg.payload.params.rate;
    this.state.crosshairX = msg.payload.params.crosshair_x;
    return msg.payload;
  }

  async config(opts: { rate?: number; crosshair_x?: number }): Promise<void> {
    const msg = await this.request("config", opts);
    if (msg.verb !== "ok") throw new Error(`expected ok, got ${msg.verb}`);
  }

  async reset(seedContext = ""): Promise<void> {
    const msg = await this.request("reset", { seed_context: seedContext });
    if (msg.verb !== "ok") throw new Error(`expected ok, got ${msg.verb}`);
  }

  async bye(): Promise<void> {
    try {
      await this.request("bye", {});
    } finally {
      this.state.status = "closed";
      this.transport.close();
    }
  }
}
