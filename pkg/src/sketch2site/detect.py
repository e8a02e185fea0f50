"""Element detection on a binary stroke map.

All passes share one contour scene built from the skeletonized strokes:
closed four-sided shapes are rectangle candidates, open flat strokes are
line candidates, and hole contours reveal what a shape encloses (the
image symbol's cross shows up as 3-4 triangular holes).

Pass order matters: images, paragraphs, inputs, then text, buttons, and
finally containers over everything already classified.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, DetectConfig
from .contours import Contour, approx_polygon, contour_children, polygon_area, trace_contours
from .geometry import ElementClass
from .raster import BinaryImage, GrayImage, skeletonize
from .swt import TextBox, detect_text


@dataclass
class DetectedElement:
    label: ElementClass
    box: tuple  # pixel rect (x, y, w, h)
    score: float = 1.0


def rect_iou(a, b) -> float:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix = max(0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    if inter == 0:
        return 0.0
    return inter / (aw * ah + bw * bh - inter)


def rect_inside(inner, outer, margin: int = 0) -> bool:
    ix, iy, iw, ih = inner
    ox, oy, ow, oh = outer
    return (
        ix >= ox + margin
        and iy >= oy + margin
        and ix + iw <= ox + ow - margin
        and iy + ih <= oy + oh - margin
    )


def center_inside(rect, outer) -> bool:
    x, y, w, h = rect
    ox, oy, ow, oh = outer
    cx, cy = x + w / 2.0, y + h / 2.0
    return ox <= cx <= ox + ow and oy <= cy <= oy + oh


@dataclass
class _Shape:
    contour: Contour
    index: int
    poly: np.ndarray
    bbox: tuple
    area: float
    closed: bool

    @property
    def nverts(self) -> int:
        return len(self.poly)

    @property
    def aspect(self) -> float:
        return self.bbox[3] / self.bbox[2]


@dataclass
class Scene:
    """Shared contour analysis of one skeletonized stroke map."""

    skeleton: BinaryImage
    contours: list = field(default_factory=list)
    shapes: list = field(default_factory=list)       # outer contours
    holes_of: dict = field(default_factory=dict)     # outer index -> hole shapes
    consumed: set = field(default_factory=set)       # outer indices claimed

    @classmethod
    def build(cls, edges: BinaryImage, cfg: DetectConfig) -> "Scene":
        from .raster import prune_spurs

        skeleton = prune_spurs(skeletonize(edges), cfg.spur_px)
        contours = trace_contours(skeleton)
        scene = cls(skeleton=skeleton, contours=contours)
        shapes = []
        for i, contour in enumerate(contours):
            poly = approx_polygon(contour, cfg.approx_eps)
            bbox = contour.bbox
            area = polygon_area(poly)
            closed = area >= cfg.closed_area_ratio * bbox[2] * bbox[3]
            shapes.append(_Shape(contour, i, poly, bbox, area, closed))
        scene.shapes = [s for s in shapes if s.contour.is_outer]
        scene.holes_of = {}
        kids = contour_children(contours)
        for s in shapes:
            if s.contour.is_outer:
                scene.holes_of[s.index] = [shapes[j] for j in kids[s.index] if not contours[j].is_outer]
        return scene

    def rect_candidates(self):
        for s in self.shapes:
            if s.index not in self.consumed and s.closed and s.nverts == 4:
                yield s

    def outers_inside(self, rect_shape, margin: int = 1):
        for s in self.shapes:
            if s is rect_shape:
                continue
            if rect_inside(s.bbox, rect_shape.bbox, margin):
                yield s


def _scene(edges: BinaryImage, cfg: DetectConfig, scene: Scene | None) -> Scene:
    return scene if scene is not None else Scene.build(edges, cfg)


# ---------------------------------------------------------------------------
# per-class passes
# ---------------------------------------------------------------------------


def detect_images(
    edges: BinaryImage,
    cfg: DetectConfig | None = None,
    scene: Scene | None = None,
) -> list[DetectedElement]:
    """Four-sided shapes whose holes are 3-4 triangles covering the shape."""
    cfg = cfg or DEFAULT_CONFIG.detect
    scene = _scene(edges, cfg, scene)
    found = []
    for rect in scene.shapes:
        # the cross is the discriminative evidence, so a rotation-warped
        # fifth vertex on the box is forgiven here (nowhere else)
        if rect.index in scene.consumed or not rect.closed or rect.nverts not in (4, 5):
            continue
        holes = scene.holes_of.get(rect.index, [])
        if not holes:
            continue
        # junction loops leave small junk holes an order of magnitude below
        # the cross triangles; camera noise wiggles the triangle sides, so
        # the vertex bound is generous and the count-plus-coverage test
        # carries the specificity (only the corner-anchored cross
        # partitions a box into 3-4 big holes)
        biggest = max(h.area for h in holes)
        real = [h for h in holes if h.area >= max(0.02 * rect.area, 0.15 * biggest)]
        triangles = [h for h in real if 3 <= h.nverts <= 6]
        if not 3 <= len(triangles) <= 4 or len(real) > 4:
            continue
        covered = sum(t.area for t in triangles)
        if covered < cfg.image_triangle_majority * rect.area:
            continue
        scene.consumed.add(rect.index)
        found.append(DetectedElement(ElementClass.IMAGE, rect.bbox, min(1.0, covered / rect.area)))
    return found


def detect_paragraphs(
    edges: BinaryImage,
    cfg: DetectConfig | None = None,
    scene: Scene | None = None,
) -> list[DetectedElement]:
    """Stacked runs of 3+ similar-length flat strokes."""
    cfg = cfg or DEFAULT_CONFIG.detect
    scene = _scene(edges, cfg, scene)
    page_h = scene.skeleton.shape[0]
    lines = [
        s
        for s in scene.shapes
        if s.index not in scene.consumed and not s.closed and s.aspect <= cfg.paragraph_line_aspect
    ]
    lines.sort(key=lambda s: (s.bbox[1], s.bbox[0]))

    parent = list(range(len(lines)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            a, b = lines[i].bbox, lines[j].bbox
            la, lb = a[2], b[2]
            if min(la, lb) < (1 - cfg.paragraph_len_tol) * max(la, lb):
                continue
            overlap = min(a[0] + a[2], b[0] + b[2]) - max(a[0], b[0])
            if overlap < 0.5 * min(la, lb):
                continue
            gap = max(a[1], b[1]) - min(a[1] + a[3], b[1] + b[3])
            merge_gap = min(cfg.paragraph_gap_len_frac * min(la, lb), cfg.paragraph_gap_page_frac * page_h)
            if gap > merge_gap:
                continue
            parent[find(i)] = find(j)

    groups: dict[int, list[_Shape]] = {}
    for i, line in enumerate(lines):
        groups.setdefault(find(i), []).append(line)

    found = []
    for members in sorted(groups.values(), key=lambda ms: (ms[0].bbox[1], ms[0].bbox[0])):
        if len(members) < cfg.paragraph_min_lines:
            continue
        lengths = [m.bbox[2] for m in members]
        if min(lengths) < (1 - cfg.paragraph_len_tol) * max(lengths):
            continue
        x0 = min(m.bbox[0] for m in members)
        y0 = min(m.bbox[1] for m in members)
        x1 = max(m.bbox[0] + m.bbox[2] for m in members)
        y1 = max(m.bbox[1] + m.bbox[3] for m in members)
        for m in members:
            scene.consumed.add(m.index)
        score = min(1.0, len(members) / 5.0)
        found.append(DetectedElement(ElementClass.PARAGRAPH, (x0, y0, x1 - x0, y1 - y0), score))
    return found


def detect_inputs(
    edges: BinaryImage,
    already: list[DetectedElement] | None = None,
    cfg: DetectConfig | None = None,
    scene: Scene | None = None,
) -> list[DetectedElement]:
    """Flat empty rectangles (nothing nested, interior one clean hole)."""
    cfg = cfg or DEFAULT_CONFIG.detect
    scene = _scene(edges, cfg, scene)
    already = already or []
    found = []
    for rect in scene.rect_candidates():
        if rect.aspect >= cfg.input_aspect:
            continue
        if any(True for _ in scene.outers_inside(rect)):
            continue
        if any(center_inside(det.box, rect.bbox) for det in already):
            continue
        holes = scene.holes_of.get(rect.index, [])
        if not holes:
            continue
        main = max(holes, key=lambda h: h.area)
        if main.area < 0.7 * rect.area:
            continue
        if any(h.area > 0.05 * rect.area for h in holes if h is not main):
            continue
        scene.consumed.add(rect.index)
        found.append(
            DetectedElement(ElementClass.INPUT, rect.bbox, 1.0 - rect.aspect / cfg.input_aspect)
        )
    return found


def detect_titles(
    gray: GrayImage,
    edges: BinaryImage,
    cfg: DetectConfig | None = None,
    scene: Scene | None = None,
) -> list[DetectedElement]:
    """Text lines, before the button pass claims the boxed ones."""
    cfg = cfg or DEFAULT_CONFIG.detect
    scene = _scene(edges, cfg, scene)
    boxes = detect_text(gray, scene.skeleton, cfg)
    return [DetectedElement(ElementClass.TITLE, tb.box, 0.8) for tb in boxes]


def detect_buttons(
    titles: list[DetectedElement],
    edges: BinaryImage,
    cfg: DetectConfig | None = None,
    scene: Scene | None = None,
) -> tuple[list[DetectedElement], list[DetectedElement]]:
    """Titles snugly boxed by an otherwise-empty rectangle become buttons."""
    cfg = cfg or DEFAULT_CONFIG.detect
    scene = _scene(edges, cfg, scene)
    buttons = []
    remaining = []
    for title in titles:
        tx, ty, tw, th = title.box
        candidates = []
        for rect in scene.rect_candidates():
            # pen thickness inflates text boxes a little past the stroke
            # skeleton, so enclosure allows a 3 px overhang
            if not rect_inside(title.box, rect.bbox, -3):
                continue
            candidates.append(rect)
        candidates.sort(key=lambda r: r.area)
        chosen = None
        for rect in candidates:
            if cfg.button_ratio_mode == "dimension":
                snug = rect.bbox[2] <= cfg.button_area_ratio * tw and rect.bbox[3] <= cfg.button_area_ratio * th
            else:
                snug = rect.area <= cfg.button_area_ratio * (tw * th)
            if not snug:
                continue
            # nothing else inside: every nested stroke belongs to the text
            extraneous = False
            for s in scene.outers_inside(rect):
                sx, sy, sw, sh = s.bbox
                if not rect_inside((sx, sy, sw, sh), (tx - 3, ty - 3, tw + 6, th + 6), 0):
                    extraneous = True
                    break
            if not extraneous:
                chosen = rect
                break
        if chosen is None:
            remaining.append(title)
        else:
            scene.consumed.add(chosen.index)
            ratio = chosen.area / (tw * th)
            buttons.append(
                DetectedElement(ElementClass.BUTTON, chosen.bbox, min(1.0, cfg.button_area_ratio / max(ratio, 1e-9) - 0.5))
            )
    return buttons, remaining


def detect_containers(
    edges: BinaryImage,
    classified: list[DetectedElement],
    cfg: DetectConfig | None = None,
    scene: Scene | None = None,
) -> list[tuple]:
    """Unclaimed rectangles enclosing at least one classified element."""
    cfg = cfg or DEFAULT_CONFIG.detect
    scene = _scene(edges, cfg, scene)
    out = []
    for rect in scene.rect_candidates():
        if any(center_inside(det.box, rect.bbox) and rect_iou(det.box, rect.bbox) < 0.9 for det in classified):
            scene.consumed.add(rect.index)
            out.append(rect.bbox)
    return out


def _dedupe(dets: list[DetectedElement], iou: float) -> list[DetectedElement]:
    kept: list[DetectedElement] = []
    for det in sorted(dets, key=lambda d: -d.score):
        if all(rect_iou(det.box, k.box) <= iou for k in kept):
            kept.append(det)
    kept.sort(key=lambda d: (d.box[1], d.box[0]))
    return kept


def detect_all(
    gray: GrayImage,
    edges: BinaryImage,
    cfg: DetectConfig | None = None,
) -> tuple[list[DetectedElement], list[tuple]]:
    """Run every pass in dependency order over one shared scene."""
    cfg = cfg or DEFAULT_CONFIG.detect
    scene = Scene.build(edges, cfg)

    images = _dedupe(detect_images(edges, cfg, scene), cfg.dedupe_iou)
    paragraphs = _dedupe(detect_paragraphs(edges, cfg, scene), cfg.dedupe_iou)
    inputs = _dedupe(detect_inputs(edges, images + paragraphs, cfg, scene), cfg.dedupe_iou)
    titles = detect_titles(gray, edges, cfg, scene)
    buttons, titles = detect_buttons(titles, edges, cfg, scene)
    buttons = _dedupe(buttons, cfg.dedupe_iou)

    # SWT happily reports the crosses of wide image symbols and stray marks
    # inside other detections; text inside a claimed element is not a title
    blockers = images + paragraphs + inputs + buttons
    titles = [t for t in titles if not any(center_inside(t.box, b.box) for b in blockers)]
    titles = _dedupe(titles, cfg.dedupe_iou)

    elements = images + paragraphs + inputs + buttons + titles
    containers = detect_containers(edges, elements, cfg, scene)
    elements.sort(key=lambda d: (d.box[1], d.box[0]))
    containers.sort(key=lambda b: (b[1], b[0]))
    return elements, containers
