"""Normalized page rendering and color-based structure extraction.

A normalized page is the style-free ground truth: every leaf is a solid
class-colored rectangle, every container a 2-px class-colored outline on
white.  Extraction inverts that by thresholding one class color at a
time, tracing contours, and rebuilding the tree from the boxes.

The 100%-width convention for titles and paragraphs is enforced by the
layout generator (this artifact's stand-in for the website), so the
renderer draws boxes verbatim and extract(render(t)) stays exact.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..contours import trace_contours
from ..geometry import BBox, LayoutNode, to_relative
from ..hierarchy import build_tree
from ..raster import RgbImage
from .palette import DEFAULT_PALETTE, LabelPalette

OUTLINE_PX = 2


def _px_rect(box: BBox, w_px: int, h_px: int):
    x0 = round(box.x * w_px)
    y0 = round(box.y * h_px)
    x1 = round(box.right * w_px)
    y1 = round(box.bottom * h_px)
    return x0, y0, max(x1, x0 + 1), max(y1, y0 + 1)


def render_normalized(
    tree: LayoutNode,
    palette: LabelPalette = DEFAULT_PALETTE,
    w_px: int = 512,
    h_px: int = 640,
) -> RgbImage:
    """Solid leaves, outlined containers, white background."""
    img = np.full((h_px, w_px, 3), 255, dtype=np.uint8)
    for node in tree.walk():
        if node is tree:
            continue  # the page root is the canvas itself
        color = palette.color(node.label)
        x0, y0, x1, y1 = _px_rect(node.box, w_px, h_px)
        if node.is_leaf:
            img[y0:y1, x0:x1] = color
        else:
            img[y0:y1, x0:x1] = color
            ix0, iy0 = x0 + OUTLINE_PX, y0 + OUTLINE_PX
            ix1, iy1 = max(ix0, x1 - OUTLINE_PX), max(iy0, y1 - OUTLINE_PX)
            img[iy0:iy1, ix0:ix1] = 255
    return img


def extract_structure(
    img: RgbImage,
    palette: LabelPalette = DEFAULT_PALETTE,
) -> LayoutNode:
    """Rebuild the layout tree from a normalized page image."""
    h_px, w_px = img.shape[:2]
    known = np.zeros(img.shape[:2], dtype=bool)
    white = (img == 255).all(axis=2)
    known |= white

    boxes = []
    for label in palette.drawable_labels:
        color = np.array(palette.color(label), dtype=np.uint8)
        mask = (img == color).all(axis=2)
        if not mask.any():
            continue
        known |= mask
        for contour in trace_contours(mask):
            if not contour.is_outer:
                continue
            x, y, w, h = contour.bbox
            boxes.append((label, to_relative((x, y, w, h), w_px, h_px)))

    unknown = (~known).mean()
    if unknown > 0.001:
        warnings.warn(f"{unknown:.1%} of pixels match no palette color", stacklevel=2)
    return build_tree(boxes)
