/**
 * Client state and its reducer. All network and user events funnel
 * through here; the renderer consumes the resulting state.
 *
 * Overrides are presentation-local (never sent upstream) and keyed by
 * the node's child-index path, so they survive document updates as long
 * as the path still resolves.
 */

import { DocParseError, DslNode, NodePath, UpdateMessage, nodeAt, parseDoc } from "./protocol.js";

export interface NodeOverride {
  imageSrc?: string;
  text?: string;
  color?: string;
}

export type ConnectionStatus = "connecting" | "live" | "closed";

export interface ClientState {
  doc: DslNode | null;
  lastSeq: number;
  connection: ConnectionStatus;
  overrides: Map<NodePath, NodeOverride>;
  lastError: string | null;
}

export function initialState(): ClientState {
  return { doc: null, lastSeq: 0, connection: "connecting", overrides: new Map(), lastError: null };
}

export interface ReduceResult {
  state: ClientState;
  changed: boolean;
}

/** Apply one WebSocket frame; stale or malformed frames leave the doc alone. */
export function applyUpdate(state: ClientState, msg: UpdateMessage): ReduceResult {
  if (msg.kind === "hello") {
    return { state, changed: false };
  }
  if (msg.kind === "error") {
    return { state: { ...state, lastError: msg.payload || "server error" }, changed: false };
  }
  if (msg.seq <= state.lastSeq) {
    return { state, changed: false }; // out of order: ignore
  }
  let doc: DslNode;
  try {
    doc = parseDoc(msg.payload);
  } catch (err) {
    if (err instanceof DocParseError) {
      return { state: { ...state, lastError: err.message }, changed: false };
    }
    throw err;
  }
  return {
    state: { ...state, doc, lastSeq: msg.seq, lastError: null },
    changed: true,
  };
}

export function setConnection(state: ClientState, connection: ConnectionStatus): ClientState {
  return { ...state, connection };
}

/** Adopt a document fetched over HTTP (reconnect catch-up). */
export function adoptDocument(state: ClientState, doc: DslNode, seq: number): ClientState {
  return { ...state, doc, lastSeq: Math.max(state.lastSeq, seq), lastError: null };
}

export type EditAction =
  | { kind: "drop_image"; path: NodePath; src: string }
  | { kind: "set_text"; path: NodePath; text: string }
  | { kind: "set_color"; path: NodePath; color: string };

export interface EditResult {
  state: ClientState;
  ok: boolean;
  reason?: string;
}

/** Record a local override; stale paths are refused (caller shows a toast). */
export function userEdit(state: ClientState, action: EditAction): EditResult {
  if (state.doc === null || nodeAt(state.doc, action.path) === undefined) {
    return { state, ok: false, reason: `no node at path ${action.path || "(root)"}` };
  }
  const overrides = new Map(state.overrides);
  const current = { ...(overrides.get(action.path) ?? {}) };
  if (action.kind === "drop_image") current.imageSrc = action.src;
  if (action.kind === "set_text") current.text = action.text;
  if (action.kind === "set_color") current.color = action.color;
  overrides.set(action.path, current);
  return { state: { ...state, overrides }, ok: true };
}
