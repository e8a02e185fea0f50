"""Bounding-box hierarchy inference and sketch-error normalization.

Tree building is an area-ascending sweep: each box adopts every
previously placed top-level box it contains, so the smallest enclosing
box always wins as the parent.  Whatever remains top-level hangs off the
page root.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .config import DEFAULT_CONFIG, TreeConfig
from .geometry import (
    BBox,
    LayoutNode,
    NodeLabel,
    bbox_contains,
    bbox_intersection,
    page_root,
)


def build_tree(
    elements: Iterable[tuple[Optional[NodeLabel], BBox]],
    cfg: TreeConfig | None = None,
) -> LayoutNode:
    """Assemble labeled/unlabeled boxes into a page tree."""
    cfg = cfg or DEFAULT_CONFIG.tree
    nodes = [LayoutNode(label, box) for label, box in elements]
    nodes.sort(key=lambda n: (n.box.area, n.box.y, n.box.x))

    top: list[LayoutNode] = []
    for node in nodes:
        adopted = [t for t in top if bbox_contains(node.box, t.box, cfg.containment_tol)]
        for child in adopted:
            top.remove(child)
        node.children.extend(adopted)
        top.append(node)

    # partially overlapping leftovers attach to the neighbour holding most
    # of their area; ties break toward the smaller candidate parent
    placed = True
    while placed:
        placed = False
        for node in list(top):
            candidates = []
            for pos, other in enumerate(top):
                if other is node or other.box.area < node.box.area:
                    continue
                frac = bbox_intersection(node.box, other.box) / node.box.area
                if frac >= cfg.overlap_attach_frac:
                    candidates.append((frac, -other.box.area, -pos, other))
            if candidates:
                best = max(candidates)[-1]
                top.remove(node)
                best.children.append(node)
                placed = True

    # an element-labeled node must stay a leaf; lift anything it swallowed
    root = page_root(top)
    _lift_misadopted(root)
    root.sort_recursive()
    return root


def _lift_misadopted(node: LayoutNode) -> None:
    from .geometry import ElementClass

    for child in list(node.children):
        _lift_misadopted(child)
        if isinstance(child.label, ElementClass) and child.children:
            node.children.extend(child.children)
            child.children = []


def _single_linkage_clusters(values: Sequence[float], eps: float) -> list[list[int]]:
    """Indices grouped so consecutive sorted values within eps chain together."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    clusters: list[list[int]] = []
    for idx in order:
        if clusters and values[idx] - values[clusters[-1][-1]] <= eps:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return clusters


def _snap_pass(boxes: list[list[float]], eps: float) -> list[list[float]]:
    """One mean-snapping pass over lefts, rights, tops, widths, heights."""
    out = [b[:] for b in boxes]

    def snap(getter, setter):
        values = [getter(b) for b in out]
        for cluster in _single_linkage_clusters(values, eps):
            if len(cluster) < 2:
                continue
            mean = float(np.mean([values[i] for i in cluster]))
            for i in cluster:
                if values[i] != mean:
                    setter(out[i], mean)

    snap(lambda b: b[0], lambda b, v: b.__setitem__(0, v))                      # lefts
    snap(lambda b: b[1], lambda b, v: b.__setitem__(1, v))                      # tops
    snap(lambda b: b[2], lambda b, v: b.__setitem__(2, v))                      # widths
    snap(lambda b: b[3], lambda b, v: b.__setitem__(3, v))                      # heights
    # right edges move by resizing, so left alignment survives
    snap(lambda b: b[0] + b[2], lambda b, v: b.__setitem__(2, v - b[0]))
    return out


def normalize_layout(tree: LayoutNode, cfg: TreeConfig | None = None) -> LayoutNode:
    """Mean-snap nearly aligned sibling edges and sizes, recursively.

    Snapping is iterated to a fixed point so the operation is idempotent.
    """
    cfg = cfg or DEFAULT_CONFIG.tree
    root = LayoutNode(tree.label, tree.box, [normalize_layout(c, cfg) for c in tree.children])
    if len(root.children) < 2:
        return root

    # width and right-edge snapping interact, so run to an exact float
    # fixed point (or a 2-cycle, whose first state we keep)
    boxes = [[c.box.x, c.box.y, c.box.w, c.box.h] for c in root.children]
    previous = None
    for _ in range(200):
        snapped = _snap_pass(boxes, cfg.snap_eps)
        if snapped == boxes or snapped == previous:
            break
        previous = boxes
        boxes = snapped

    parent = root.box
    for child, (x, y, w, h) in zip(root.children, boxes):
        w = min(w, parent.w)
        h = min(h, parent.h)
        x = min(max(x, parent.x), parent.right - w)
        y = min(max(y, parent.y), parent.bottom - h)
        child.box = BBox(x, y, w, h)
    return root
