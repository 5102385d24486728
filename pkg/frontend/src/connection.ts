/**
 * One connection, one strictly ordered request queue.  A request is not
 * written to the wire until the answer to the previous one has arrived,
 * so the server always sees the same order the user produced and the UI
 * never races ahead of its feedback.
 */

import { RESULTS, Response, type Method, type Result } from "./protocol.js";

export interface Transport {
  send(line: string): void;
  onMessage(handler: (line: string) => void): void;
  close(): void;
}

export class RpcError extends Error {
  constructor(
    readonly code: number,
    message: string,
    readonly data?: unknown,
  ) {
    super(message);
    this.name = "RpcError";
  }
}

interface Pending {
  id: string;
  line: string;
  resolve: (value: unknown) => void;
  reject: (reason: Error) => void;
}

export class Connection {
  private counter = 0;
  private queue: Pending[] = [];
  private inFlight: Pending | null = null;

  constructor(private readonly transport: Transport) {
    transport.onMessage((line) => this.receive(line));
  }

  call<M extends Method>(
    method: M,
    params: Record<string, unknown> = {},
  ): Promise<Result<M>> {
    const id = `c${++this.counter}`;
    const line = JSON.stringify({ id, method, params });
    return new Promise<unknown>((resolve, reject) => {
      this.queue.push({ id, line, resolve, reject });
      this.pump();
    }).then((result) => RESULTS[method].parse(result) as Result<M>);
  }

  close(): void {
    this.transport.close();
  }

  private pump(): void {
    if (this.inFlight !== null) return;
    const next = this.queue.shift();
    if (next === undefined) return;
    this.inFlight = next;
    this.transport.send(next.line);
  }

  private receive(line: string): void {
    const pending = this.inFlight;
    const response = Response.parse(JSON.parse(line));
    if (pending === null || response.id !== pending.id) {
      // nothing of ours in flight, or an answer to a different request:
      // the server broke the one-at-a-time contract
      throw new Error(`unexpected response id ${JSON.stringify(response.id)}`);
    }
    this.inFlight = null;
    if (response.error !== undefined) {
      const e = response.error;
      pending.reject(new RpcError(e.code, e.message, e.data));
    } else {
      pending.resolve(response.result);
    }
    this.pump();
  }
}

/** Browser transport over a WebSocket; resolves once the socket is open. */
export function connectWebSocket(url: string): Promise<Transport> {
  return new Promise((resolve, reject) => {
    const socket = new WebSocket(url);
    const handlers: Array<(line: string) => void> = [];
    socket.onmessage = (event) => {
      for (const h of handlers) h(String(event.data));
    };
    socket.onerror = () => reject(new Error(`cannot reach ${url}`));
    // some agents skip the error event on a refused connection
    socket.onclose = () => reject(new Error(`cannot reach ${url}`));
    socket.onopen = () =>
      resolve({
        send: (line) => socket.send(line),
        onMessage: (handler) => handlers.push(handler),
        close: () => socket.close(),
      });
  });
}
