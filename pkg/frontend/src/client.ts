// Thin protocol client: request/response correlation plus notification
// dispatch over a websocket-shaped transport. The socket is injected so the
// controller can run against the browser WebSocket, Node's implementation,
// or a scripted fake in tests.

import { ErrorBody, Notification, RequestError } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onmessage: ((data: string) => void) | null;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

/** Adapt a standard WebSocket (browser or Node >= 20) to SocketLike. */
export function webSocketFactory(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onmessage: null,
    onopen: null,
    onclose: null,
  };
  ws.onmessage = (event) => like.onmessage?.(String(event.data));
  ws.onopen = () => like.onopen?.();
  ws.onclose = () => like.onclose?.();
  ws.onerror = () => {};
  return like;
}

interface Pending {
  resolve: (value: unknown) => void;
  reject: (err: Error) => void;
}

export class ProtocolClient {
  private socket: SocketLike | null = null;
  private nextId = 1;
  private pending = new Map<number, Pending>();

  onNotification: ((note: Notification) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;

  constructor(
    private url: string,
    private factory: SocketFactory,
  ) {}

  connect(): void {
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => this.onOpen?.();
    socket.onmessage = (data) => this.dispatch(data);
    socket.onclose = () => {
      this.failAll(new Error("connection closed"));
      this.onClose?.();
    };
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }

  request<T = Record<string, unknown>>(method: string, params: object): Promise<T> {
    const id = this.nextId++;
    const payload = JSON.stringify({ id, method, params });
    return new Promise<T>((resolve, reject) => {
      if (!this.socket) {
        reject(new Error("not connected"));
        return;
      }
      this.pending.set(id, { resolve: resolve as (v: unknown) => void, reject });
      this.socket.send(payload);
    });
  }

  private dispatch(data: string): void {
    let message: Record<string, unknown>;
    try {
      message = JSON.parse(data);
    } catch {
      return;
    }
    const id = message.id;
    if (typeof id === "number" && this.pending.has(id)) {
      const waiter = this.pending.get(id)!;
      this.pending.delete(id);
      if ("error" in message) {
        waiter.reject(new RequestError(message.error as ErrorBody));
      } else {
        waiter.resolve(message.result);
      }
      return;
    }
    if (typeof message.method === "string") {
      this.onNotification?.(message as unknown as Notification);
    }
  }

  private failAll(err: Error): void {
    for (const waiter of this.pending.values()) {
      waiter.reject(err);
    }
    this.pending.clear();
  }
}
