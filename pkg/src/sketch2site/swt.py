"""Stroke width transform text detection, tuned for pen sketches.

Three departures from the generic scene-text formulation: contour
pre-filtering restricts work to leaf regions (innermost shapes), only
the dark-on-light pass runs, and detections that stay taller than 0.8 of
their width are discarded (the image-symbol cross shows up as an "x"
otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, DetectConfig
from .contours import trace_contours
from .raster import BinaryImage, GrayImage, canny, sobel_gradients


@dataclass
class TextBox:
    box: tuple  # pixel rect (x, y, w, h)
    mean_stroke_width: float


def swt_map(
    gray: GrayImage,
    edges: BinaryImage,
    cfg: DetectConfig | None = None,
) -> np.ndarray:
    """Per-pixel stroke widths (np.inf where unset).

    Rays cast from edge pixels along the dark-side gradient stop on the
    first opposing edge (within pi/6); a median pass then trims the rays
    that overshot at joints.
    """
    cfg = cfg or DEFAULT_CONFIG.detect
    gx, gy = sobel_gradients(gray, smooth_sigma=1.0)
    mag = np.hypot(gx, gy)
    mag[mag < 1e-9] = 1.0
    ux, uy = gx / mag, gy / mag

    height, width = gray.shape
    swt = np.full((height, width), np.inf)
    rays = []
    max_len = cfg.swt_max_stroke

    edge_ys, edge_xs = np.nonzero(edges)
    for y0, x0 in zip(edge_ys.tolist(), edge_xs.tolist()):
        # gradient points dark -> light; walk the other way, into the stroke
        dx, dy = -ux[y0, x0], -uy[y0, x0]
        ray = [(y0, x0)]
        hit = None
        for t in range(1, max_len + 1):
            x = int(round(x0 + dx * t))
            y = int(round(y0 + dy * t))
            if x < 0 or y < 0 or x >= width or y >= height:
                break
            if (y, x) == ray[-1]:
                continue
            ray.append((y, x))
            if edges[y, x] and (y, x) != (y0, x0):
                dot = ux[y0, x0] * ux[y, x] + uy[y0, x0] * uy[y, x]
                if dot <= cfg.swt_angle_tol_dot:
                    hit = (y, x)
                break
        if hit is None:
            continue
        length = float(np.hypot(hit[1] - x0, hit[0] - y0))
        idx = tuple(np.array(ray).T)
        swt[idx] = np.minimum(swt[idx], length)
        rays.append(idx)

    for idx in rays:
        values = swt[idx]
        finite = values[np.isfinite(values)]
        if len(finite) == 0:
            continue
        median = np.median(finite)
        swt[idx] = np.minimum(values, median)
    return swt


def _components(swt: np.ndarray, ratio: float):
    """Connected groups of stroke pixels with widths within ``ratio``."""
    height, width = swt.shape
    labels = np.full((height, width), -1, dtype=np.int64)
    finite = np.isfinite(swt)
    comps = []
    neighbours = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
    for sy, sx in zip(*np.nonzero(finite)):
        if labels[sy, sx] != -1:
            continue
        comp = [(sy, sx)]
        labels[sy, sx] = len(comps)
        stack = [(sy, sx)]
        while stack:
            y, x = stack.pop()
            for dy, dx in neighbours:
                ny, nx = y + dy, x + dx
                if 0 <= ny < height and 0 <= nx < width and labels[ny, nx] == -1 and finite[ny, nx]:
                    lo, hi = sorted((swt[y, x], swt[ny, nx]))
                    if hi <= ratio * lo:
                        labels[ny, nx] = labels[sy, sx]
                        comp.append((ny, nx))
                        stack.append((ny, nx))
        comps.append(comp)
    return comps


@dataclass
class _Letter:
    x0: int
    y0: int
    x1: int
    y1: int
    width: float  # median stroke width

    @property
    def h(self):
        return self.y1 - self.y0 + 1

    @property
    def w(self):
        return self.x1 - self.x0 + 1

    @property
    def cy(self):
        return (self.y0 + self.y1) / 2.0


def _letters_in_region(gray, cfg: DetectConfig, page_h: int):
    """Letter candidates: connected ink strokes carrying their SWT stats.

    Pen strokes are thin, so rays rarely cover a whole curved stroke;
    grouping raw SWT pixels fragments letters at the curves.  Candidates
    are therefore the ink-connected components (the leaf-region
    pre-filter already isolated them from boxes), with stroke statistics
    taken from the pixels valid rays did reach.
    """
    from scipy import ndimage as _ndi

    edges = canny(gray, cfg.canny_lo, cfg.canny_hi)
    swt = swt_map(gray, edges, cfg)
    ink = gray < 128
    labels, n = _ndi.label(ink, structure=np.ones((3, 3), dtype=int))
    letters = []
    for idx in range(1, n + 1):
        mask = labels == idx
        widths = swt[mask & np.isfinite(swt)]
        if len(widths) < 0.2 * mask.sum():
            continue  # barely any valid rays: not stroke-like
        mean_w = widths.mean()
        # coefficient-of-variation reading of "variance < half mean":
        # raw variance is px^2 and rejects every pen stroke
        if widths.std() > cfg.letter_var_ratio * mean_w:
            continue
        ys, xs = np.nonzero(mask)
        h = ys.max() - ys.min() + 1
        w = xs.max() - xs.min() + 1
        if h < cfg.text_min_height or h > cfg.text_max_height_frac * page_h:
            continue
        if h / w > cfg.letter_aspect_max:
            continue
        letters.append(_Letter(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()), float(np.median(widths))))
    return letters


def _leaf_regions(edges: BinaryImage, pad: int = 2):
    """Bboxes of outer contours with no other outer contour inside."""
    contours = trace_contours(edges)
    outers = [c for c in contours if c.is_outer]
    boxes = [c.bbox for c in outers]
    height, width = edges.shape
    regions = []
    for i, (x, y, w, h) in enumerate(boxes):
        nested = False
        for j, (ox, oy, ow, oh) in enumerate(boxes):
            if i == j:
                continue
            if ox > x and oy > y and ox + ow < x + w and oy + oh < y + h:
                nested = True
                break
        if nested:
            continue
        x0 = max(0, x - pad)
        y0 = max(0, y - pad)
        x1 = min(width, x + w + pad)
        y1 = min(height, y + h + pad)
        regions.append((x0, y0, x1, y1))
    return regions


def detect_text(
    gray: GrayImage,
    edges: BinaryImage,
    cfg: DetectConfig | None = None,
) -> list[TextBox]:
    """Text line boxes. ``edges`` provides the leaf-region pre-filter."""
    cfg = cfg or DEFAULT_CONFIG.detect
    page_h = gray.shape[0]

    letters: list[_Letter] = []
    for x0, y0, x1, y1 in _leaf_regions(edges):
        region = gray[y0:y1, x0:x1]
        if region.shape[0] < 4 or region.shape[1] < 4:
            continue
        for letter in _letters_in_region(region, cfg, page_h):
            letters.append(
                _Letter(letter.x0 + x0, letter.y0 + y0, letter.x1 + x0, letter.y1 + y0, letter.width)
            )

    # group letters into lines: similar stroke and height, horizontally near
    parent = list(range(len(letters)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(letters)):
        for j in range(i + 1, len(letters)):
            a, b = letters[i], letters[j]
            wide, narrow = max(a.width, b.width), min(a.width, b.width)
            if wide > cfg.group_stroke_ratio * max(narrow, 0.5):
                continue
            tall, short = max(a.h, b.h), min(a.h, b.h)
            if tall > cfg.group_height_ratio * short:
                continue
            gap = max(a.x0, b.x0) - min(a.x1, b.x1)
            if gap > cfg.group_gap_stroke_mult * max((a.width + b.width) / 2.0, 1.0):
                continue
            if abs(a.cy - b.cy) > 0.6 * tall:
                continue
            parent[find(i)] = find(j)

    groups: dict[int, list[_Letter]] = {}
    for i, letter in enumerate(letters):
        groups.setdefault(find(i), []).append(letter)

    boxes = []
    for members in groups.values():
        x0 = min(m.x0 for m in members)
        y0 = min(m.y0 for m in members)
        x1 = max(m.x1 for m in members)
        y1 = max(m.y1 for m in members)
        mean_width = float(np.mean([m.width for m in members]))
        # letters are measured on pen ink; every other detector measures
        # stroke centerlines, so pull the box in one pixel of ink margin
        shrink = 1 if mean_width >= 2 else 0
        x0, y0 = x0 + shrink, y0 + shrink
        w = max(1, x1 - x0 + 1 - shrink)
        h = max(1, y1 - y0 + 1 - shrink)
        if h / w > cfg.text_final_aspect:
            continue
        boxes.append(TextBox(box=(x0, y0, w, h), mean_stroke_width=mean_width))
    boxes.sort(key=lambda t: (t.box[1], t.box[0]))
    return boxes
