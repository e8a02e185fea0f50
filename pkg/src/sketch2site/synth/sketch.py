"""Synthetic sketching: replace every leaf with a hand-drawn glyph.

Each leaf box gets independent translate/scale jitter; glyph content is
additionally rotated a little (except text, which people write level).
Rotated content is re-fitted to its box, mirroring how detection later
corrects rotation with the minimum axis-aligned bounding box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import BBox, ElementClass, LayoutNode
from ..raster import BinaryImage, morphology, skeletonize
from .glyphs import Glyph, GlyphCorpus, bin_resize, draw_wavy_rect, rotate_binary, tight_crop

# rotation jitter spans this fraction of a quarter turn at jitter=1.0
ROTATION_RANGE_DEG = 90.0


@dataclass
class SketchParams:
    jitter: float = 0.025      # max fraction for translate/scale/rotate
    seed: int = 0
    stroke: str = "thin"       # "thin" = skeletal 1 px, "pen" = ~3 px

    def __post_init__(self):
        if not (0 <= self.jitter <= 0.05):
            raise ValueError("jitter must be within [0, 0.05]")
        if self.stroke not in ("thin", "pen"):
            raise ValueError(f"unknown stroke policy {self.stroke!r}")


def _jitter_box(box: BBox, rng, jitter: float) -> BBox:
    if jitter == 0:
        return box
    tx, ty, sw, sh = rng.uniform(-jitter, jitter, 4)
    w = box.w * (1 + sw)
    h = box.h * (1 + sh)
    x = box.x + tx * box.w
    y = box.y + ty * box.h
    # jittered boxes stay on the page
    w, h = min(w, 1.0), min(h, 1.0)
    x = min(max(x, 0.0), 1.0 - w)
    y = min(max(y, 0.0), 1.0 - h)
    return BBox(x, y, w, h)


def _scaled_glyph(glyph: Glyph, bw: int, bh: int, angle: float) -> np.ndarray:
    img = glyph.image
    if abs(angle) > 1e-6 and not glyph.is_text:
        img = tight_crop(rotate_binary(morphology(img, "dilate", 3), angle))
    if glyph.is_text:
        gh, gw = img.shape
        # boxes are generated at the glyph aspect; when quantization has
        # nudged them a hair (<4%), filling the box exactly beats leaving
        # a sliver, and the distortion is invisible
        if abs((bh / bw) / (gh / gw) - 1.0) > 0.04:
            scale = min(bw / gw, bh / gh)
            bw = max(1, int(round(gw * scale)))
            bh = max(1, int(round(gh * scale)))
    return skeletonize(bin_resize(img, max(1, bh), max(1, bw)))


def sketch_render(
    tree: LayoutNode,
    corpus: GlyphCorpus,
    params: SketchParams | None = None,
    w_px: int = 512,
    h_px: int = 640,
    with_boxes: bool = False,
):
    """Binary sketch of ``tree``; optionally also per-node drawn pixel boxes."""
    params = params or SketchParams()
    for cls in ElementClass:
        if cls not in corpus or not corpus[cls]:
            raise KeyError(f"glyph corpus is missing class {cls.value}")
    rng = np.random.default_rng(params.seed)
    canvas = np.zeros((h_px, w_px), dtype=bool)
    placed = []

    for node in tree.walk():
        if node is tree:
            continue
        box = _jitter_box(node.box, rng, params.jitter)
        # 2 px inset: stroke wobble must not clip at the page border
        x0 = min(max(round(box.x * w_px), 2), w_px - 4)
        y0 = min(max(round(box.y * h_px), 2), h_px - 4)
        x1 = max(x0 + 2, min(round(box.right * w_px), w_px - 2))
        y1 = max(y0 + 2, min(round(box.bottom * h_px), h_px - 2))
        if node.is_leaf:
            glyphs = corpus[node.label]
            glyph = glyphs[int(rng.integers(0, len(glyphs)))]
            angle = float(rng.uniform(-params.jitter, params.jitter)) * ROTATION_RANGE_DEG
            if min(x1 - x0, y1 - y0) < 48:
                angle = 0.0  # tiny symbols are drawn level; tilt destroys them
            patch = _scaled_glyph(glyph, x1 - x0, y1 - y0, angle)
            ph, pw = patch.shape
            # aspect-preserved text may not fill the box; keep it centered
            oy = y0 + (y1 - y0 - ph) // 2
            ox = x0 + (x1 - x0 - pw) // 2
            oy = min(max(oy, 0), h_px - ph)
            ox = min(max(ox, 0), w_px - pw)
            canvas[oy : oy + ph, ox : ox + pw] |= patch
            placed.append((node, (ox, oy, pw, ph)))
        else:
            # long container edges are drawn against a ruler-ish hand; big
            # wobble also biases the traced bbox taller than the box
            draw_wavy_rect(canvas, x0, y0, x1 - 1, y1 - 1, rng, amp=0.4)
            placed.append((node, (x0, y0, x1 - x0, y1 - y0)))

    if params.stroke == "pen":
        canvas = morphology(canvas, "dilate", 3)
    if with_boxes:
        return canvas, placed
    return canvas


def as_gray_sketch(sketch: BinaryImage, thicken: int = 3) -> np.ndarray:
    """Dark strokes on white, pen-width, for text detection paths."""
    strokes = morphology(sketch, "dilate", thicken) if thicken > 1 else sketch
    gray = np.full(sketch.shape, 255, dtype=np.uint8)
    gray[strokes] = 30
    return gray
