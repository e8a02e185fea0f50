"""Hand-drawn element symbol bank.

The corpus ships as generated handwriting-like strokes so the repository
is self-contained; :func:`load_corpus` accepts user-scanned glyph PNGs
laid out as ``corpus/<class>/<k>.png`` for people who want to substitute
real pen work.

Every glyph is a 1-px skeletal stroke image with a tight content bbox.
Text glyphs (titles) are drawn on fixed-aspect canvases so layout boxes
and aspect-preserving scaling agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..geometry import ElementClass
from ..raster import load_png, save_png, skeletonize

# canvas shapes (h, w); the pixel aspect of text-like classes is locked so
# the layout generator can emit boxes the glyphs fill exactly
TITLE_CANVAS = (35, 160)
BUTTON_CANVAS = (42, 120)  # near the smallest drawn button: downscales stay mild
INPUT_CANVAS = (64, 320)
IMAGE_CANVAS = (136, 160)  # taller than 0.8 so the "x" aspect filter bites
PARAGRAPH_CANVAS = (110, 240)

TITLE_ASPECT = TITLE_CANVAS[0] / TITLE_CANVAS[1]
BUTTON_ASPECT = BUTTON_CANVAS[0] / BUTTON_CANVAS[1]

# text clearance must survive downscaling to the smallest buttons the
# layout generator emits, or the strokes merge and the symbol is lost
BUTTON_PAD_X = 4
BUTTON_PAD_Y = 5


@dataclass
class Glyph:
    image: np.ndarray  # bool, 1-px strokes, tight bbox
    is_text: bool = False


GlyphCorpus = dict  # ElementClass -> list[Glyph]


# ---------------------------------------------------------------------------
# stroke drawing
# ---------------------------------------------------------------------------


def draw_line(canvas: np.ndarray, p0, p1) -> None:
    """Bresenham segment, endpoints inclusive."""
    x0, y0 = int(round(p0[0])), int(round(p0[1]))
    x1, y1 = int(round(p1[0])), int(round(p1[1]))
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    h, w = canvas.shape
    while True:
        if 0 <= y0 < h and 0 <= x0 < w:
            canvas[y0, x0] = True
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def draw_polyline(canvas: np.ndarray, points) -> None:
    for a, b in zip(points[:-1], points[1:]):
        draw_line(canvas, a, b)


def wavy_segment(p0, p1, rng, amp: float, step: float = 4.0):
    """Sample points along p0->p1 with smooth perpendicular wobble."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    length = np.hypot(*(p1 - p0))
    n = max(2, int(length / step))
    t = np.linspace(0.0, 1.0, n + 1)
    base = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    direction = (p1 - p0) / max(length, 1e-9)
    normal = np.array([-direction[1], direction[0]])
    phase = rng.uniform(0, 2 * np.pi)
    freq = rng.uniform(1.0, 2.5)
    wobble = amp * np.sin(2 * np.pi * freq * t + phase) * np.sin(np.pi * t)
    wobble += rng.normal(0, amp * 0.15, len(t)) * np.sin(np.pi * t)
    return base + wobble[:, None] * normal[None, :]


def draw_wavy_rect(canvas: np.ndarray, x0, y0, x1, y1, rng, amp: float = 1.6) -> None:
    """Closed hand-drawn rectangle; corners meet exactly."""
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    for a, b in zip(corners, corners[1:] + corners[:1]):
        draw_polyline(canvas, wavy_segment(a, b, rng, amp))


def draw_squiggle(canvas: np.ndarray, x0, x1, y_top, y_bottom, rng) -> None:
    """Connected handwriting-like scribble filling the given box."""
    mid = (y_top + y_bottom) / 2.0
    half = (y_bottom - y_top) / 2.0
    hump_w = rng.uniform(6.0, 10.0)
    n = max(3, int((x1 - x0) / hump_w))
    xs = np.linspace(x0, x1, n * 6 + 1)
    u = np.linspace(0, n * np.pi, len(xs))
    amps = rng.uniform(0.55, 1.0, n + 1)
    amp_at = np.interp(u / np.pi, np.arange(n + 1), amps)
    ys = mid - half * amp_at * np.sin(u)
    points = np.stack([xs, np.clip(ys, y_top, y_bottom)], axis=1)
    draw_polyline(canvas, points)
    # one tall stroke (an ascender) guarantees the full vertical extent
    ax = rng.uniform(x0 + 2, x1 - 2)
    draw_line(canvas, (ax, y_bottom), (ax + rng.uniform(-2, 2), y_top))


# ---------------------------------------------------------------------------
# resampling
# ---------------------------------------------------------------------------


def tight_crop(img: np.ndarray) -> np.ndarray:
    ys, xs = np.nonzero(img)
    if len(ys) == 0:
        return img[:1, :1].copy()
    return img[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1].copy()


def bin_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Coverage resampling: an output pixel is ink if its source block is.

    Equivalent to area resampling thresholded at 'any coverage', which
    keeps thin lines alive in both directions.
    """
    h, w = img.shape
    integral = np.zeros((h + 1, w + 1), dtype=np.int64)
    integral[1:, 1:] = np.cumsum(np.cumsum(img.astype(np.int64), axis=0), axis=1)
    yb = np.floor(np.arange(out_h + 1) * h / out_h).astype(np.int64)
    xb = np.floor(np.arange(out_w + 1) * w / out_w).astype(np.int64)
    yb[-1], xb[-1] = h, w
    y0, y1 = yb[:-1], np.maximum(yb[1:], yb[:-1] + 1)
    x0, x1 = xb[:-1], np.maximum(xb[1:], xb[:-1] + 1)
    sums = (
        integral[np.ix_(y1, x1)]
        - integral[np.ix_(y0, x1)]
        - integral[np.ix_(y1, x0)]
        + integral[np.ix_(y0, x0)]
    )
    return sums > 0


def rotate_binary(img: np.ndarray, degrees: float) -> np.ndarray:
    """Nearest-neighbour rotation onto a canvas sized to fit."""
    if abs(degrees) < 1e-6:
        return img.copy()
    theta = np.radians(degrees)
    c, s = np.cos(theta), np.sin(theta)
    h, w = img.shape
    out_w = int(np.ceil(abs(w * c) + abs(h * s)))
    out_h = int(np.ceil(abs(h * c) + abs(w * s)))
    cy_in, cx_in = (h - 1) / 2.0, (w - 1) / 2.0
    cy_out, cx_out = (out_h - 1) / 2.0, (out_w - 1) / 2.0
    ys, xs = np.mgrid[0:out_h, 0:out_w]
    dx = xs - cx_out
    dy = ys - cy_out
    sx = np.rint(c * dx + s * dy + cx_in).astype(np.int64)
    sy = np.rint(-s * dx + c * dy + cy_in).astype(np.int64)
    valid = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    out = np.zeros((out_h, out_w), dtype=bool)
    out[valid] = img[sy[valid], sx[valid]]
    return out


def _finalize(canvas: np.ndarray, shape) -> np.ndarray:
    thin = skeletonize(bin_resize(tight_crop(canvas), shape[0], shape[1]))
    # thinning can retract strokes off the canvas edge; refit so the
    # content bbox is exactly the canvas (box-fitting relies on it)
    return bin_resize(tight_crop(thin), shape[0], shape[1])


# ---------------------------------------------------------------------------
# per-class glyph constructors
# ---------------------------------------------------------------------------


def _title_glyph(rng) -> Glyph:
    h, w = TITLE_CANVAS
    canvas = np.zeros((h + 10, w + 10), dtype=bool)
    words = 1 if rng.random() < 0.6 else 2
    if words == 1:
        draw_squiggle(canvas, 5, w + 4, 5, h + 4, rng)
    else:
        split = rng.uniform(0.42, 0.58)
        gap = 4
        draw_squiggle(canvas, 5, 5 + (w - gap) * split, 5, h + 4, rng)
        draw_squiggle(canvas, 5 + (w - gap) * split + gap, w + 4, 5, h + 4, rng)
    return Glyph(_finalize(canvas, TITLE_CANVAS), is_text=True)


def _image_glyph(rng) -> Glyph:
    h, w = IMAGE_CANVAS
    canvas = np.zeros((h + 12, w + 12), dtype=bool)
    x0, y0, x1, y1 = 6, 6, w + 5, h + 5
    draw_wavy_rect(canvas, x0, y0, x1, y1, rng, amp=rng.uniform(0.8, 1.4))
    amp = rng.uniform(0.8, 1.8)
    draw_polyline(canvas, wavy_segment((x0, y0), (x1, y1), rng, amp))
    draw_polyline(canvas, wavy_segment((x1, y0), (x0, y1), rng, amp))
    return Glyph(_finalize(canvas, IMAGE_CANVAS))


def _button_glyph(rng) -> Glyph:
    h, w = BUTTON_CANVAS
    canvas = np.zeros((h + 12, w + 12), dtype=bool)
    x0, y0, x1, y1 = 6, 6, w + 5, h + 5
    # low wobble: the border must never touch the text inside
    draw_wavy_rect(canvas, x0, y0, x1, y1, rng, amp=rng.uniform(0.4, 0.7))
    draw_squiggle(canvas, x0 + BUTTON_PAD_X, x1 - BUTTON_PAD_X, y0 + BUTTON_PAD_Y, y1 - BUTTON_PAD_Y, rng)
    return Glyph(_finalize(canvas, BUTTON_CANVAS))


def _input_glyph(rng) -> Glyph:
    h, w = INPUT_CANVAS
    canvas = np.zeros((h + 12, w + 12), dtype=bool)
    draw_wavy_rect(canvas, 6, 6, w + 5, h + 5, rng, amp=rng.uniform(0.5, 0.9))
    return Glyph(_finalize(canvas, INPUT_CANVAS))


def _paragraph_glyph(rng) -> Glyph:
    h, w = PARAGRAPH_CANVAS
    canvas = np.zeros((h + 10, w + 10), dtype=bool)
    # 5-6 lines keeps the spacing under the merge threshold at every size
    # the layout generator emits
    n_lines = int(rng.integers(5, 7))
    ys = np.linspace(5, h + 4, n_lines)
    full = w - 1.0
    for i, y in enumerate(ys):
        frac = 1.0 if i == 0 else rng.uniform(0.88, 1.0)
        if i == n_lines - 1:
            frac = rng.uniform(0.8, 0.95)  # last line of a block runs short
        pts = wavy_segment((5, y), (5 + full * frac, y), rng, amp=rng.uniform(0.6, 1.2))
        draw_polyline(canvas, pts)
    return Glyph(_finalize(canvas, PARAGRAPH_CANVAS))


_BUILDERS = {
    ElementClass.TITLE: _title_glyph,
    ElementClass.IMAGE: _image_glyph,
    ElementClass.BUTTON: _button_glyph,
    ElementClass.INPUT: _input_glyph,
    ElementClass.PARAGRAPH: _paragraph_glyph,
}

DEFAULT_CORPUS_SEED = 2018


def build_corpus(seed: int = DEFAULT_CORPUS_SEED, per_class: int = 18) -> GlyphCorpus:
    """Deterministic generated corpus, ``per_class`` variants per symbol."""
    rng = np.random.default_rng(seed)
    corpus: GlyphCorpus = {}
    for cls in ElementClass:
        corpus[cls] = [_BUILDERS[cls](rng) for _ in range(per_class)]
    return corpus


def save_corpus(corpus: GlyphCorpus, directory) -> None:
    root = Path(directory)
    for cls, glyphs in corpus.items():
        sub = root / cls.value
        sub.mkdir(parents=True, exist_ok=True)
        for k, glyph in enumerate(glyphs):
            save_png(glyph.image, sub / f"{k}.png")


def load_corpus(directory) -> GlyphCorpus:
    """Read glyph PNGs; strokes are re-thinned so scans behave like ours."""
    root = Path(directory)
    corpus: GlyphCorpus = {}
    for cls in ElementClass:
        sub = root / cls.value
        if not sub.is_dir():
            raise FileNotFoundError(f"corpus is missing a {cls.value}/ directory")
        glyphs = []
        for path in sorted(sub.glob("*.png")):
            img = load_png(path)
            if img.ndim == 3:
                img = img.mean(axis=2)
            mask = img > 127 if img.dtype != bool else img
            glyphs.append(Glyph(skeletonize(tight_crop(mask)), is_text=cls is ElementClass.TITLE))
        if not glyphs:
            raise FileNotFoundError(f"no glyphs under {sub}")
        corpus[cls] = glyphs
    return corpus
