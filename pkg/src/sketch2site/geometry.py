"""Shared geometric and taxonomic types for wireframe layout trees.

All coordinates past image capture are page-relative fractions in [0, 1]
with a top-left origin.  Pixel rectangles only exist inside the raster
modules and are plain ``(x, y, w, h)`` integer tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence, Union


class ElementClass(str, Enum):
    """The five leaf symbols a wireframe can contain."""

    TITLE = "title"
    PARAGRAPH = "paragraph"
    BUTTON = "button"
    INPUT = "input"
    IMAGE = "image"


class ContainerClass(str, Enum):
    """Branch labels; PAGE appears only at the tree root."""

    ROW = "row"
    STACK = "stack"
    FORM = "form"
    HEADER = "header"
    FOOTER = "footer"
    PAGE = "page"


NodeLabel = Union[ElementClass, ContainerClass]

ELEMENT_CLASSES = tuple(ElementClass)
CONTAINER_CLASSES = tuple(ContainerClass)

_BOUND_EPS = 1e-6


@dataclass(frozen=True)
class BBox:
    """Page-relative bounding box: x, y top-left corner, w, h extents."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"bbox extents must be positive: {self}")
        if self.x < -_BOUND_EPS or self.y < -_BOUND_EPS:
            raise ValueError(f"bbox origin out of page: {self}")
        if self.x + self.w > 1 + _BOUND_EPS or self.y + self.h > 1 + _BOUND_EPS:
            raise ValueError(f"bbox exceeds page: {self}")

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def aspect(self) -> float:
        """Aspect ratio, defined as height/width throughout the artifact."""
        return self.h / self.w


def bbox_contains(parent: BBox, child: BBox, tol: float = 0.0) -> bool:
    """True iff ``child`` lies within ``parent`` expanded by ``tol`` per side."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return (
        child.x >= parent.x - tol
        and child.y >= parent.y - tol
        and child.right <= parent.right + tol
        and child.bottom <= parent.bottom + tol
    )


def bbox_intersection(a: BBox, b: BBox) -> float:
    """Intersection area of two boxes (0 when disjoint)."""
    iw = min(a.right, b.right) - max(a.x, b.x)
    ih = min(a.bottom, b.bottom) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    return iw * ih


def bbox_iou(a: BBox, b: BBox) -> float:
    """Intersection over union, in [0, 1]."""
    inter = bbox_intersection(a, b)
    if inter == 0.0:
        return 0.0
    return min(1.0, inter / (a.area + b.area - inter))


def to_relative(rect_px, page_w: int, page_h: int) -> BBox:
    """Convert a pixel rect ``(x, y, w, h)`` to page-relative fractions."""
    if page_w <= 0 or page_h <= 0:
        raise ValueError("page dimensions must be positive")
    x, y, w, h = rect_px
    return BBox(x / page_w, y / page_h, w / page_w, h / page_h)


def to_pixels(box: BBox, page_w: int, page_h: int):
    """Inverse of :func:`to_relative`; rounds to the nearest pixel."""
    x0 = round(box.x * page_w)
    y0 = round(box.y * page_h)
    x1 = round(box.right * page_w)
    y1 = round(box.bottom * page_h)
    return (x0, y0, max(1, x1 - x0), max(1, y1 - y0))


@dataclass
class LayoutNode:
    """A wireframe tree node.

    Leaves carry an :class:`ElementClass`, branches a :class:`ContainerClass`.
    Container nodes fresh out of hierarchy inference are unlabeled (``None``)
    until the container classifier runs.  Children are kept in reading order
    (y, then x).
    """

    label: Optional[NodeLabel]
    box: BBox
    children: list["LayoutNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["LayoutNode"]:
        """Pre-order traversal."""
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> Iterator["LayoutNode"]:
        for node in self.walk():
            if node.is_leaf:
                yield node

    def branches(self) -> Iterator["LayoutNode"]:
        for node in self.walk():
            if not node.is_leaf:
                yield node

    def leaf_descendants(self) -> list["LayoutNode"]:
        """All leaf descendants in reading order (used by featurization)."""
        out = [n for n in self.walk() if n is not self and n.is_leaf]
        out.sort(key=lambda n: (n.box.y, n.box.x))
        return out

    def sort_recursive(self) -> None:
        """Sort every child list into reading order, in place."""
        self.children.sort(key=lambda n: (n.box.y, n.box.x))
        for child in self.children:
            child.sort_recursive()


def page_root(children: Optional[Sequence[LayoutNode]] = None) -> LayoutNode:
    """A PAGE node spanning the whole page."""
    return LayoutNode(ContainerClass.PAGE, BBox(0.0, 0.0, 1.0, 1.0), list(children or []))


def pre_order_labels(tree: LayoutNode) -> list[str]:
    """Flatten the tree into its pre-order label sequence."""
    return [node.label.value if node.label is not None else "?" for node in tree.walk()]


def tree_equal(a: LayoutNode, b: LayoutNode, box_tol: float = 0.0) -> bool:
    """Structural equality: same labels, same shape, boxes within ``box_tol``."""
    if a.label != b.label or len(a.children) != len(b.children):
        return False
    if (
        abs(a.box.x - b.box.x) > box_tol
        or abs(a.box.y - b.box.y) > box_tol
        or abs(a.box.w - b.box.w) > box_tol
        or abs(a.box.h - b.box.h) > box_tol
    ):
        return False
    return all(tree_equal(ca, cb, box_tol) for ca, cb in zip(a.children, b.children))


def copy_tree(tree: LayoutNode) -> LayoutNode:
    return LayoutNode(tree.label, tree.box, [copy_tree(c) for c in tree.children])
