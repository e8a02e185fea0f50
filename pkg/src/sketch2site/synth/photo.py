"""Synthetic camera shots of sketch pages, with known ground truth.

This is the capture module's test oracle: the renderer knows exactly
where the page corners land, so recovered quads can be scored against
the truth.
"""

from __future__ import annotations

import numpy as np

from ..raster import BinaryImage, RgbImage


def sketch_to_page(sketch: BinaryImage, paper: int = 250, ink: int = 30) -> RgbImage:
    """A white paper page with the sketch drawn in dark marker."""
    h, w = sketch.shape
    page = np.full((h, w, 3), paper, dtype=np.uint8)
    page[sketch] = ink
    return page


def render_photo(
    page: RgbImage,
    angle_deg: float,
    canvas_scale: float = 1.4,
    background: int = 120,
):
    """Rotate ``page`` onto a gray background; returns (photo, corners).

    Corners are (TL, TR, BR, BL) of the page in photo pixels, ordered for
    the unrotated page and carried through the rotation.
    """
    h, w = page.shape[:2]
    theta = np.radians(angle_deg)
    c, s = np.cos(theta), np.sin(theta)

    out_w = int(np.ceil((abs(w * c) + abs(h * s)) * canvas_scale))
    out_h = int(np.ceil((abs(h * c) + abs(w * s)) * canvas_scale))
    cx_in, cy_in = (w - 1) / 2.0, (h - 1) / 2.0
    cx_out, cy_out = (out_w - 1) / 2.0, (out_h - 1) / 2.0

    ys, xs = np.mgrid[0:out_h, 0:out_w]
    dx = xs - cx_out
    dy = ys - cy_out
    # rotate backwards into page coordinates
    sx = c * dx + s * dy + cx_in
    sy = -s * dx + c * dy + cy_in
    inside = (sx >= -0.5) & (sx <= w - 0.5) & (sy >= -0.5) & (sy <= h - 0.5)

    photo = np.full((out_h, out_w, 3), background, dtype=np.uint8)
    x0 = np.clip(np.floor(sx).astype(int), 0, w - 1)
    y0 = np.clip(np.floor(sy).astype(int), 0, h - 1)
    x1 = np.clip(x0 + 1, 0, w - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    fx = np.clip(sx - x0, 0, 1)[..., None]
    fy = np.clip(sy - y0, 0, 1)[..., None]
    src = page.astype(np.float64)
    top = src[y0, x0] * (1 - fx) + src[y0, x1] * fx
    bot = src[y1, x0] * (1 - fx) + src[y1, x1] * fx
    blended = np.clip(np.rint(top * (1 - fy) + bot * fy), 0, 255).astype(np.uint8)
    photo[inside] = blended[inside]

    def out_xy(px, py):
        rx = c * (px - cx_in) - s * (py - cy_in) + cx_out
        ry = s * (px - cx_in) + c * (py - cy_in) + cy_out
        return (rx, ry)

    corners = np.array(
        [out_xy(0, 0), out_xy(w - 1, 0), out_xy(w - 1, h - 1), out_xy(0, h - 1)]
    )
    return photo, corners
