/**
 * The live connection: WebSocket subscription with reconnect, plus the
 * HTTP catch-up fetch of /latest.wire.json after a reconnect.
 *
 * Socket and fetch are injectable so tests can drive the client without
 * a server.
 */

import { DslNode, UpdateMessage, parseDoc } from "./protocol.js";
import {
  ClientState,
  EditAction,
  adoptDocument,
  applyUpdate,
  initialState,
  setConnection,
  userEdit,
} from "./state.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  close(): void;
}

export interface ClientHooks {
  onChange(state: ClientState): void;
  onToast?(message: string): void;
}

export interface ClientOptions {
  socketFactory?: (url: string) => SocketLike;
  fetchFn?: (url: string) => Promise<{ ok: boolean; text(): Promise<string> }>;
  reconnectDelayMs?: number;
  baseUrl?: string;
}

export class PreviewClient {
  state: ClientState = initialState();
  private socket: SocketLike | null = null;
  private stopped = false;
  private readonly socketFactory: (url: string) => SocketLike;
  private readonly fetchFn: (url: string) => Promise<{ ok: boolean; text(): Promise<string> }>;
  private readonly reconnectDelayMs: number;
  private readonly baseUrl: string;

  constructor(
    private hooks: ClientHooks,
    options: ClientOptions = {},
  ) {
    this.socketFactory =
      options.socketFactory ?? ((url) => new WebSocket(url) as unknown as SocketLike);
    this.fetchFn = options.fetchFn ?? ((url) => fetch(url));
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
    this.baseUrl = options.baseUrl ?? "";
  }

  connect(): void {
    const wsUrl = this.wsUrl();
    this.socket = this.socketFactory(wsUrl);
    this.socket.onopen = () => {
      this.update(setConnection(this.state, "live"));
    };
    this.socket.onmessage = (ev) => {
      let msg: UpdateMessage;
      try {
        msg = JSON.parse(ev.data) as UpdateMessage;
      } catch {
        return; // not a frame we understand
      }
      const { state, changed } = applyUpdate(this.state, msg);
      if (changed || state !== this.state) this.update(state);
    };
    this.socket.onclose = () => {
      if (this.stopped) return;
      this.update(setConnection(this.state, "closed"));
      setTimeout(() => {
        if (this.stopped) return;
        void this.catchUp();
        this.connect();
      }, this.reconnectDelayMs);
    };
  }

  /** Fetch the latest document over HTTP (used after reconnects). */
  async catchUp(): Promise<void> {
    try {
      const res = await this.fetchFn(`${this.baseUrl}/latest.wire.json`);
      if (!res.ok) return;
      const doc: DslNode = parseDoc(await res.text());
      this.update(adoptDocument(this.state, doc, this.state.lastSeq));
    } catch {
      // nothing published yet, or the server is still down
    }
  }

  edit(action: EditAction): boolean {
    const result = userEdit(this.state, action);
    if (!result.ok) {
      this.hooks.onToast?.(result.reason ?? "edit failed");
      return false;
    }
    this.update(result.state);
    return true;
  }

  stop(): void {
    this.stopped = true;
    this.socket?.close();
  }

  private update(state: ClientState): void {
    this.state = state;
    this.hooks.onChange(state);
  }

  private wsUrl(): string {
    if (this.baseUrl) {
      return this.baseUrl.replace(/^http/, "ws") + "/ws";
    }
    const proto = location.protocol === "https:" ? "wss://" : "ws://";
    return proto + location.host + "/ws";
  }
}
