"""Turn a raw camera photo into a deskewed binary edge map of the sketch.

The page is assumed to be the largest white four-sided region in frame
(paper or whiteboard); everything else is background.
"""

from __future__ import annotations

import numpy as np

from .config import CaptureConfig, DEFAULT_CONFIG
from .contours import approx_polygon, polygon_area, trace_contours
from .raster import (
    BinaryImage,
    RgbImage,
    as_rgb,
    canny,
    hsv_threshold,
    median_blur,
    morphology,
    rgb_to_gray,
    warp_perspective,
)


class NoPageFound(Exception):
    """No four-sided white region large enough to be the page."""


def order_corners(points: np.ndarray) -> np.ndarray:
    """Order 4 corners TL, TR, BR, BL."""
    pts = np.asarray(points, dtype=np.float64)
    s = pts.sum(axis=1)
    d = pts[:, 0] - pts[:, 1]
    return np.array([pts[np.argmin(s)], pts[np.argmax(d)], pts[np.argmax(s)], pts[np.argmin(d)]])


def find_page_quad(photo: RgbImage, cfg: CaptureConfig | None = None) -> np.ndarray:
    """Corners of the sketch page (TL, TR, BR, BL) in source pixels."""
    cfg = cfg or DEFAULT_CONFIG.capture
    photo = as_rgb(photo)
    height, width = photo.shape[:2]
    if height < 200 or width < 200:
        raise ValueError(f"photo too small: {width}x{height}, need >= 200x200")

    white = hsv_threshold(photo, cfg.white_lo, cfg.white_hi)
    # a large median fills the pen strokes the threshold removed
    filled = median_blur(white.astype(np.uint8) * 255, cfg.page_median)
    edges = canny(filled, cfg.page_canny_lo, cfg.page_canny_hi)
    edges = morphology(edges, "dilate", cfg.page_dilate)

    min_area = cfg.min_page_area_frac * height * width
    best = None
    best_area = 0.0
    for contour in trace_contours(edges):
        if not contour.is_outer:
            continue
        poly = approx_polygon(contour, cfg.approx_eps)
        if len(poly) != 4:
            continue
        area = polygon_area(poly)
        if area >= min_area and area > best_area:
            best = _refine_quad(contour.points, poly)
            best_area = area
    if best is None:
        # a page filling the whole frame leaves no traceable boundary
        if white.mean() > 0.98:
            return np.array(
                [[0, 0], [width - 1, 0], [width - 1, height - 1], [0, height - 1]], dtype=np.float64
            )
        raise NoPageFound("no four-sided white region above the area floor")
    return order_corners(best)


def _refine_quad(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Blur rounds the mask corners, pulling polygon vertices inward.

    Each side of the quad is re-fit to the straight run of contour points
    between corners (ends excluded); corner estimates are the adjacent
    line intersections.
    """
    idx = []
    for vertex in poly:
        matches = np.nonzero((points == vertex).all(axis=1))[0]
        if len(matches) == 0:
            return poly
        idx.append(int(matches[0]))
    order = np.argsort(idx)
    idx = [idx[i] for i in order]

    n = len(points)
    lines = []
    for k in range(4):
        a, b = idx[k], idx[(k + 1) % 4]
        segment = points[a : b + 1] if b > a else np.vstack([points[a:], points[: b + 1]])
        trim = max(2, len(segment) // 6)
        middle = segment[trim:-trim] if len(segment) > 2 * trim + 2 else segment
        centroid = middle.mean(axis=0)
        centered = middle - centroid
        _, _, vt = np.linalg.svd(centered.astype(np.float64), full_matrices=False)
        lines.append((centroid, vt[0]))

    corners = []
    for k in range(4):
        (p1, d1) = lines[k]
        (p2, d2) = lines[(k + 1) % 4]
        mat = np.array([d1, -d2]).T
        if abs(np.linalg.det(mat)) < 1e-9:
            return poly
        t = np.linalg.solve(mat, p2 - p1)
        corners.append(p1 + t[0] * d1)
    corners = np.array(corners)
    # the traced ring sits on the dilated edge map, ~2 px outside the true
    # page boundary; pull the quad back in toward its centroid
    centroid = corners.mean(axis=0)
    offsets = corners - centroid
    norms = np.linalg.norm(offsets, axis=1, keepdims=True)
    return corners - offsets / np.maximum(norms, 1e-9) * 2.0


def _deskew(photo: RgbImage, cfg: CaptureConfig) -> np.ndarray:
    """Warp the detected page to a flat grayscale, max side cfg.max_side."""
    quad = find_page_quad(photo, cfg)
    top = np.hypot(*(quad[1] - quad[0]))
    bottom = np.hypot(*(quad[2] - quad[3]))
    left = np.hypot(*(quad[3] - quad[0]))
    right = np.hypot(*(quad[2] - quad[1]))
    qw = (top + bottom) / 2.0
    qh = (left + right) / 2.0
    scale = cfg.max_side / max(qw, qh)
    out_w = max(2, int(round(qw * scale)))
    out_h = max(2, int(round(qh * scale)))
    flat = warp_perspective(as_rgb(photo), quad, out_w, out_h)
    return median_blur(rgb_to_gray(flat), cfg.sketch_median)


def capture_page(photo: RgbImage, cfg: CaptureConfig | None = None):
    """(grayscale page, stroke edge map), both deskewed and cropped.

    The edge map is the Canny edges of the page, dilated to close the
    double edges a pen stroke produces into solid strokes.  A thin border
    margin is cleared: warping always smears some background onto the
    page rim, and sketches keep a paper margin anyway.
    """
    cfg = cfg or DEFAULT_CONFIG.capture
    gray = _deskew(photo, cfg)
    edges = canny(gray, cfg.sketch_canny_lo, cfg.sketch_canny_hi)
    # closing (not plain dilation) fuses the double edges of each pen
    # stroke while leaving the gaps BETWEEN symbols alone
    edges = morphology(edges, "close", cfg.sketch_fuse)
    margin = max(4, round(0.008 * max(edges.shape)))
    edges[:margin, :] = False
    edges[-margin:, :] = False
    edges[:, :margin] = False
    edges[:, -margin:] = False
    return gray, edges


def crop_to_sketch(photo: RgbImage, cfg: CaptureConfig | None = None) -> BinaryImage:
    """Deskewed binary edge map of the sketch region of ``photo``."""
    return capture_page(photo, cfg)[1]
