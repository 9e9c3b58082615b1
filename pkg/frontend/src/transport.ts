// Line-oriented transports. The client never cares whether lines travel
// over a WebSocket (browser, via the bridge) or a child process (tests).

export interface Transport {
  send(line: string): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class WebSocketTransport implements Transport {
  private ws: WebSocket;
  private lineCb: ((line: string) => void) | null = null;
  private closeCb: (() => void) | null = null;

  private constructor(ws: WebSocket) {
    this.ws = ws;
    ws.addEventListener("message", (ev) => {
      const text = typeof ev.data === "string" ? ev.data : "";
      for (const line of text.split("\n")) {
        if (line.trim() && this.lineCb) this.lineCb(line);
      }
    });
    ws.addEventListener("close", () => this.closeCb?.());
    ws.addEventListener("error", () => this.closeCb?.());
  }

  static connect(url: string): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(url);
      ws.addEventListener("open", () => resolve(new WebSocketTransport(ws)));
      ws.addEventListener("error", () => reject(new Error(`cannot reach ${url}`)));
    });
  }

  send(line: string): void {
    this.ws.send(line + "\n");
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  close(): void {
    this.ws.close();
  }
}
