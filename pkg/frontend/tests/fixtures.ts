import { DslNode, NodeType } from "../src/protocol.js";

export function leaf(type: NodeType, x: number, y: number, w = 0.08, h = 0.04): DslNode {
  return { type, x, y, width: w, height: h, left_padding: 0, top_padding: 0, contains: [] };
}

export function branch(type: NodeType, x: number, y: number, w: number, h: number, contains: DslNode[]): DslNode {
  return { type, x, y, width: w, height: h, left_padding: 0, top_padding: 0, contains };
}

export function pageDoc(contains: DslNode[]): DslNode {
  return branch("page", 0, 0, 1, 1, contains);
}

/** A deterministic fixture with exactly `total` nodes (root included). */
export function bigDoc(total = 200): DslNode {
  const sections: DslNode[] = [];
  let nodes = 1; // the root
  let si = 0;
  while (nodes < total) {
    const kids: DslNode[] = [];
    const y = 0.02 + (si % 12) * 0.08;
    for (let k = 0; k < 8 && nodes + kids.length + 1 < total; k++) {
      const cls = (["image", "title", "paragraph", "button", "input"] as const)[k % 5];
      kids.push(leaf(cls, 0.05 + k * 0.11, y + 0.01, 0.09, 0.05));
    }
    sections.push(branch("row", 0.02, y, 0.96, 0.07, kids));
    nodes += kids.length + 1;
    si += 1;
  }
  return pageDoc(sections);
}

export function countNodes(doc: DslNode): number {
  return 1 + doc.contains.reduce((acc, c) => acc + countNodes(c), 0);
}
