/**
 * Differential DOM rendering of a layout document.
 *
 * Every node carries a stable path key; subtrees whose content (and
 * override) did not change are reused as-is rather than rebuilt, so a
 * one-leaf update touches one branch of the DOM.
 */

import { DslNode, NodePath, childPath, isLeafType } from "./protocol.js";
import { NodeOverride } from "./state.js";

export interface RenderStats {
  built: number;
  reused: number;
}

interface CacheEntry {
  el: HTMLElement;
  fingerprint: string;
}

const LEAF_TEXT: Record<string, string> = { title: "Title", button: "Button" };

export class DocRenderer {
  private cache = new Map<NodePath, CacheEntry>();
  private errorBanner: HTMLElement | null = null;

  constructor(
    private root: HTMLElement,
    private doc: Document = root.ownerDocument,
  ) {}

  /** Rebuild the page for a document; returns build/reuse counters. */
  render(docRoot: DslNode | null, overrides: Map<NodePath, NodeOverride> = new Map()): RenderStats {
    const stats: RenderStats = { built: 0, reused: 0 };
    this.clearError();
    const visited = new Set<NodePath>();
    const tops: HTMLElement[] = [];
    if (docRoot !== null) {
      docRoot.contains.forEach((child, i) => {
        tops.push(this.build(child, childPath("", i), overrides, stats, visited));
      });
    }
    this.root.replaceChildren(...tops);
    for (const key of [...this.cache.keys()]) {
      if (!visited.has(key)) this.cache.delete(key);
    }
    return stats;
  }

  /** Show a banner; the previous render stays on screen. */
  renderError(message: string): void {
    this.clearError();
    const banner = this.doc.createElement("div");
    banner.className = "error-banner";
    banner.textContent = message;
    this.root.prepend(banner);
    this.errorBanner = banner;
  }

  leafCount(): number {
    return this.root.querySelectorAll("[data-leaf='1']").length;
  }

  private clearError(): void {
    this.errorBanner?.remove();
    this.errorBanner = null;
  }

  private build(
    node: DslNode,
    path: NodePath,
    overrides: Map<NodePath, NodeOverride>,
    stats: RenderStats,
    visited: Set<NodePath>,
  ): HTMLElement {
    visited.add(path);
    const override = overrides.get(path);
    const fingerprint = JSON.stringify(node) + "|" + JSON.stringify(override ?? null);
    const cached = this.cache.get(path);
    if (cached && cached.fingerprint === fingerprint) {
      stats.reused += 1;
      this.markSubtreeVisited(node, path, visited);
      return cached.el;
    }

    const el = this.doc.createElement("div");
    const leaf = node.contains.length === 0 && isLeafType(node.type);
    el.className = `node ${node.type}`;
    el.dataset.path = path;
    if (leaf) el.dataset.leaf = "1";
    el.style.position = "absolute";
    el.style.left = `${node.x * 100}%`;
    el.style.top = `${node.y * 100}%`;
    el.style.width = `${node.width * 100}%`;
    el.style.height = `${node.height * 100}%`;

    if (leaf) {
      const text = override?.text ?? LEAF_TEXT[node.type];
      if (text !== undefined) el.textContent = text;
      if (node.type === "image") {
        if (override?.imageSrc) {
          el.style.backgroundImage = `url(${override.imageSrc})`;
          el.style.backgroundSize = "cover";
          el.dataset.customImage = "1";
        } else {
          el.classList.add("placeholder");
        }
      }
    }
    if (override?.color) {
      el.style.backgroundColor = override.color;
    }

    node.contains.forEach((child, i) => {
      el.appendChild(this.build(child, childPath(path, i), overrides, stats, visited));
    });
    this.cache.set(path, { el, fingerprint });
    stats.built += 1;
    return el;
  }

  private markSubtreeVisited(node: DslNode, path: NodePath, visited: Set<NodePath>): void {
    node.contains.forEach((child, i) => {
      const p = childPath(path, i);
      visited.add(p);
      this.markSubtreeVisited(child, p, visited);
    });
  }
}
