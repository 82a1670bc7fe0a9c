/**
 * Line-oriented duplex transports. The service speaks newline-delimited
 * JSON over TCP; a browser reaches it through a WebSocket bridge that
 * relays raw bytes, so message boundaries are not guaranteed to align
 * with lines and the receive side reassembles them.
 */

export interface Transport {
  send(line: string): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: (reason: string) => void): void;
  close(): void;
}

/** Splits a chunk stream into newline-terminated lines. */
export class LineSplitter {
  private buffer = "";

  constructor(private emit: (line: string) => void) {}

  push(chunk: string): void {
    this.buffer += chunk;
    for (;;) {
      const nl = this.buffer.indexOf("\n");
      if (nl < 0) break;
      const line = this.buffer.slice(0, nl);
      this.buffer = this.buffer.slice(nl + 1);
      if (line.length > 0) this.emit(line);
    }
  }
}

export class WebSocketTransport implements Transport {
  private ws: WebSocket;
  private splitter: LineSplitter;
  private lineCb: (line: string) => void = () => {};
  private closeCb: (reason: string) => void = () => {};
  private closed = false;

  private constructor(ws: WebSocket) {
    this.ws = ws;
    this.splitter = new LineSplitter((line) => this.lineCb(line));
    ws.onmessage = (ev) => {
      if (typeof ev.data === "string") this.splitter.push(ev.data);
    };
    ws.onclose = (ev) => this.fireClose(ev.reason || "connection closed");
    ws.onerror = () => this.fireClose("connection error");
  }

  /** Resolves once the socket is open, so send() never races the handshake. */
  static connect(url: string, timeoutMs = 5000): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      let ws: WebSocket;
      try {
        ws = new WebSocket(url);
      } catch (err) {
        reject(err);
        return;
      }
      const timer = setTimeout(() => {
        ws.close();
        reject(new Error(`timed out connecting to ${url}`));
      }, timeoutMs);
      ws.onopen = () => {
        clearTimeout(timer);
        resolve(new WebSocketTransport(ws));
      };
      ws.onerror = () => {
        clearTimeout(timer);
        reject(new Error(`cannot connect to ${url}`));
      };
    });
  }

  private fireClose(reason: string): void {
    if (this.closed) return;
    this.closed = true;
    this.closeCb(reason);
  }

  send(line: string): void {
    if (this.ws.readyState !== WebSocket.OPEN) {
      throw new Error("transport is not open");
    }
    this.ws.send(line);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: (reason: string) => void): void {
    this.closeCb = cb;
  }

  close(): void {
    this.ws.close();
    this.fireClose("closed by client");
  }
}

export interface PairOptions {
  /** Deliver in chunks of this many characters to exercise line reassembly. */
  chunkSize?: number;
  /** Deliver on a microtask instead of synchronously, like a real socket. */
  defer?: boolean;
}

/** In-memory transport pair for tests: two ends wired to each other. */
export function transportPair(options: PairOptions = {}): [MemoryTransport, MemoryTransport] {
  const a = new MemoryTransport(options);
  const b = new MemoryTransport(options);
  a.peer = b;
  b.peer = a;
  return [a, b];
}

export class MemoryTransport implements Transport {
  peer: MemoryTransport | null = null;
  sent: string[] = [];
  private splitter: LineSplitter;
  private lineCb: (line: string) => void = () => {};
  private closeCb: (reason: string) => void = () => {};
  private open = true;
  private chunkSize: number;
  private defer: boolean;

  constructor(options: PairOptions = {}) {
    this.chunkSize = options.chunkSize ?? 0;
    this.defer = options.defer ?? false;
    this.splitter = new LineSplitter((line) => this.lineCb(line));
  }

  send(line: string): void {
    if (!this.open) throw new Error("transport is not open");
    this.sent.push(line);
    const peer = this.peer;
    if (!peer) return;
    const deliver = (chunk: string) => {
      if (this.defer) queueMicrotask(() => peer.receive(chunk));
      else peer.receive(chunk);
    };
    if (this.chunkSize <= 0) {
      deliver(line);
      return;
    }
    for (let i = 0; i < line.length; i += this.chunkSize) {
      deliver(line.slice(i, i + this.chunkSize));
    }
  }

  receive(chunk: string): void {
    if (!this.open) return;  // a chunk in flight when the pair closed is dropped
    this.splitter.push(chunk);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: (reason: string) => void): void {
    this.closeCb = cb;
  }

  close(): void {
    if (!this.open) return;
    this.open = false;
    this.closeCb("closed by client");
    this.peer?.closedByPeer();
  }

  closedByPeer(): void {
    if (!this.open) return;
    this.open = false;
    this.closeCb("connection closed");
  }
}
