/**
 * Wire types shared with the preview service: the layout DSL document and
 * the WebSocket update frames.
 */

export const ELEMENT_TYPES = ["title", "paragraph", "button", "input", "image"] as const;
export const CONTAINER_TYPES = ["row", "stack", "form", "header", "footer", "page"] as const;

export type ElementType = (typeof ELEMENT_TYPES)[number];
export type ContainerType = (typeof CONTAINER_TYPES)[number];
export type NodeType = ElementType | ContainerType;

export interface DslNode {
  type: NodeType;
  x: number;
  y: number;
  width: number;
  height: number;
  left_padding: number;
  top_padding: number;
  contains: DslNode[];
}

export interface UpdateMessage {
  kind: "dsl_update" | "hello" | "error";
  seq: number;
  payload: string;
}

const KNOWN_TYPES = new Set<string>([...ELEMENT_TYPES, ...CONTAINER_TYPES]);

export class DocParseError extends Error {}

/** Parse and validate one DSL document from JSON text or a plain object. */
export function parseDoc(source: string | unknown): DslNode {
  let raw: unknown = source;
  if (typeof source === "string") {
    try {
      raw = JSON.parse(source);
    } catch (err) {
      throw new DocParseError(`not JSON: ${(err as Error).message}`);
    }
  }
  return validateNode(raw, "$");
}

function validateNode(raw: unknown, where: string): DslNode {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new DocParseError(`${where}: node must be an object`);
  }
  const obj = raw as Record<string, unknown>;
  const type = obj.type;
  if (typeof type !== "string" || !KNOWN_TYPES.has(type)) {
    throw new DocParseError(`${where}: unknown node type ${JSON.stringify(type)}`);
  }
  const numeric = (name: string): number => {
    const value = obj[name] ?? 0;
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new DocParseError(`${where}: field ${name} must be a finite number`);
    }
    return value;
  };
  const contains = obj.contains ?? [];
  if (!Array.isArray(contains)) {
    throw new DocParseError(`${where}: contains must be a list`);
  }
  return {
    type: type as NodeType,
    x: numeric("x"),
    y: numeric("y"),
    width: numeric("width"),
    height: numeric("height"),
    left_padding: numeric("left_padding"),
    top_padding: numeric("top_padding"),
    contains: contains.map((child, i) => validateNode(child, `${where}.contains[${i}]`)),
  };
}

export function isLeafType(type: NodeType): type is ElementType {
  return (ELEMENT_TYPES as readonly string[]).includes(type);
}

export function leafCount(doc: DslNode): number {
  let count = doc.contains.length === 0 && isLeafType(doc.type) ? 1 : 0;
  for (const child of doc.contains) {
    count += leafCount(child);
  }
  return count;
}

/** Stable node address: the child-index chain from the root. */
export type NodePath = string;

export function childPath(parent: NodePath, index: number): NodePath {
  return parent === "" ? String(index) : `${parent}.${index}`;
}

/** Look a path up in a document; undefined when the path no longer exists. */
export function nodeAt(doc: DslNode, path: NodePath): DslNode | undefined {
  if (path === "") return doc;
  let node: DslNode | undefined = doc;
  for (const part of path.split(".")) {
    node = node?.contains[Number(part)];
    if (node === undefined) return undefined;
  }
  return node;
}
