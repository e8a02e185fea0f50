import { describe, expect, it, vi } from "vitest";

import { PreviewClient, SocketLike } from "../src/client.js";
import { leaf, pageDoc } from "./fixtures.js";

class FakeSocket implements SocketLike {
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  closed = false;
  close() {
    this.closed = true;
  }
  emit(frame: object) {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

function makeClient(latestDoc: object | null) {
  const sockets: FakeSocket[] = [];
  const fetchCalls: string[] = [];
  const states: string[] = [];
  const client = new PreviewClient(
    {
      onChange(state) {
        states.push(`${state.connection}:${state.lastSeq}`);
      },
    },
    {
      socketFactory: () => {
        const s = new FakeSocket();
        sockets.push(s);
        return s;
      },
      fetchFn: async (url: string) => {
        fetchCalls.push(url);
        return {
          ok: latestDoc !== null,
          text: async () => JSON.stringify(latestDoc),
        };
      },
      reconnectDelayMs: 1,
      baseUrl: "http://test",
    },
  );
  return { client, sockets, fetchCalls, states };
}

describe("PreviewClient", () => {
  it("applies updates from the socket", () => {
    const { client, sockets } = makeClient(null);
    client.connect();
    sockets[0].onopen?.();
    sockets[0].emit({ kind: "dsl_update", seq: 3, payload: JSON.stringify(pageDoc([leaf("image", 0.1, 0.1)])) });
    expect(client.state.lastSeq).toBe(3);
    expect(client.state.doc?.contains).toHaveLength(1);
  });

  it("reconnects after close and catches up over HTTP", async () => {
    vi.useFakeTimers();
    const { client, sockets, fetchCalls } = makeClient(pageDoc([leaf("title", 0.2, 0.1)]));
    client.connect();
    sockets[0].onopen?.();
    sockets[0].onclose?.();
    expect(client.state.connection).toBe("closed");
    await vi.advanceTimersByTimeAsync(5);
    vi.useRealTimers();
    // give the catch-up promise a tick
    await Promise.resolve();
    expect(fetchCalls).toContain("http://test/latest.wire.json");
    expect(sockets).toHaveLength(2); // a fresh socket was opened
    expect(client.state.doc?.contains[0].type).toBe("title");
    client.stop();
  });

  it("routes failed edits to the toast hook", () => {
    const toasts: string[] = [];
    const client = new PreviewClient(
      { onChange() {}, onToast: (m) => toasts.push(m) },
      { socketFactory: () => new FakeSocket(), fetchFn: async () => ({ ok: false, text: async () => "" }), baseUrl: "http://t" },
    );
    const ok = client.edit({ kind: "set_text", path: "0", text: "x" });
    expect(ok).toBe(false);
    expect(toasts).toHaveLength(1);
  });
});
