"""Self-contained image processing primitives.

Image conventions (numpy arrays throughout):

* GrayImage  -- 2-D uint8, row major
* BinaryImage -- 2-D bool, True = foreground
* RgbImage   -- (H, W, 3) uint8

All filters use edge replication at the borders so frame pixels never
produce phantom gradients.
"""

from __future__ import annotations

import numpy as np
from PIL import Image
from scipy import ndimage

GrayImage = np.ndarray
BinaryImage = np.ndarray
RgbImage = np.ndarray


def as_gray(img: np.ndarray) -> GrayImage:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"gray image must be 2-D, got shape {arr.shape}")
    return arr.astype(np.uint8, copy=False)


def as_binary(img: np.ndarray) -> BinaryImage:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"binary image must be 2-D, got shape {arr.shape}")
    return arr.astype(bool, copy=False)


def as_rgb(img: np.ndarray) -> RgbImage:
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"rgb image must be (H, W, 3), got shape {arr.shape}")
    return arr.astype(np.uint8, copy=False)


def rgb_to_gray(img: RgbImage) -> GrayImage:
    """ITU-R 601 luma weights."""
    img = as_rgb(img)
    gray = img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114
    return np.clip(np.rint(gray), 0, 255).astype(np.uint8)


# ---------------------------------------------------------------------------
# PNG I/O (8-bit, non-interlaced)
# ---------------------------------------------------------------------------


def load_png(path) -> np.ndarray:
    """Read a PNG as gray, binary (mode 1) or rgb depending on the file."""
    with Image.open(path) as im:
        if im.mode == "1":
            return np.asarray(im, dtype=bool)
        if im.mode in ("L", "I;16", "I"):
            return np.asarray(im.convert("L"), dtype=np.uint8)
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def save_png(img: np.ndarray, path) -> None:
    arr = np.asarray(img)
    if arr.dtype == bool:
        Image.fromarray(arr.astype(np.uint8) * 255, mode="L").save(path, format="PNG")
    elif arr.ndim == 2:
        Image.fromarray(arr.astype(np.uint8), mode="L").save(path, format="PNG")
    else:
        Image.fromarray(as_rgb(arr), mode="RGB").save(path, format="PNG")


# ---------------------------------------------------------------------------
# Denoising and thresholding
# ---------------------------------------------------------------------------


def median_blur(img: GrayImage, k: int) -> GrayImage:
    """Window median with edge replication; ``k`` must be odd and >= 3."""
    if k % 2 == 0 or k < 3:
        raise ValueError(f"median window must be odd and >= 3, got {k}")
    return ndimage.median_filter(as_gray(img), size=k, mode="nearest")


def rgb_to_hsv(img: RgbImage) -> np.ndarray:
    """HSV with hue in degrees [0, 360) and S, V on 0-255 scales."""
    rgb = as_rgb(img).astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    c = v - rgb.min(axis=-1)
    s = np.where(v > 0, c / np.maximum(v, 1e-12) * 255.0, 0.0)
    h = np.zeros_like(v)
    mask = c > 0
    rm = mask & (v == r)
    gm = mask & (v == g) & ~rm
    bm = mask & ~rm & ~gm
    h[rm] = (g[rm] - b[rm]) / c[rm] % 6.0
    h[gm] = (b[gm] - r[gm]) / c[gm] + 2.0
    h[bm] = (r[bm] - g[bm]) / c[bm] + 4.0
    h *= 60.0
    return np.stack([h, s, v], axis=-1)


def hsv_threshold(img: RgbImage, lo, hi) -> BinaryImage:
    """Foreground where HSV(pixel) lies in [lo, hi] channel-wise.

    A band with lo hue > hi hue wraps around 360 (red detection needs it).
    """
    hsv = rgb_to_hsv(img)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    h_lo, s_lo, v_lo = lo
    h_hi, s_hi, v_hi = hi
    if h_lo <= h_hi:
        hue_ok = (h >= h_lo) & (h <= h_hi)
    else:
        hue_ok = (h >= h_lo) | (h <= h_hi)
    return hue_ok & (s >= s_lo) & (s <= s_hi) & (v >= v_lo) & (v <= v_hi)


# ---------------------------------------------------------------------------
# Edge detection
# ---------------------------------------------------------------------------

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


def sobel_gradients(img: GrayImage, smooth_sigma: float = 1.4):
    """(gx, gy) Sobel gradients of the Gaussian-smoothed image.

    Correlation (not convolution) so gradients point toward increasing
    intensity; stroke-width ray casting depends on that sign.
    """
    smoothed = ndimage.gaussian_filter(as_gray(img).astype(np.float64), smooth_sigma, mode="nearest")
    gx = ndimage.correlate(smoothed, _SOBEL_X, mode="nearest")
    gy = ndimage.correlate(smoothed, _SOBEL_Y, mode="nearest")
    return gx, gy


def canny(img: GrayImage, lo: float = 50.0, hi: float = 150.0) -> BinaryImage:
    """Canny edges: Sobel gradients, non-maximum suppression, hysteresis."""
    if not (0 <= lo <= hi):
        raise ValueError(f"need 0 <= lo <= hi, got lo={lo} hi={hi}")
    gx, gy = sobel_gradients(img)
    mag = np.hypot(gx, gy)

    # quantize gradient direction into 4 bins and compare against the two
    # neighbours along that direction
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    pad = np.pad(mag, 1, mode="constant")

    def shifted(dy, dx):
        return pad[1 + dy : 1 + dy + mag.shape[0], 1 + dx : 1 + dx + mag.shape[1]]

    horiz = (angle < 22.5) | (angle >= 157.5)
    diag1 = (angle >= 22.5) & (angle < 67.5)
    vert = (angle >= 67.5) & (angle < 112.5)
    diag2 = (angle >= 112.5) & (angle < 157.5)

    # strict comparison on one side breaks plateau ties so edges stay one
    # pixel wide on symmetric gradients
    keep = np.zeros_like(mag, dtype=bool)
    for sel, (da, db) in (
        (horiz, ((0, 1), (0, -1))),
        (diag1, ((1, 1), (-1, -1))),
        (vert, ((1, 0), (-1, 0))),
        (diag2, ((1, -1), (-1, 1))),
    ):
        keep |= sel & (mag > shifted(*da)) & (mag >= shifted(*db))

    suppressed = np.where(keep, mag, 0.0)
    strong = suppressed > hi
    weak = suppressed >= lo

    # hysteresis: keep weak components that touch a strong pixel
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return np.zeros_like(strong)
    strong_labels = np.unique(labels[strong])
    strong_labels = strong_labels[strong_labels != 0]
    return np.isin(labels, strong_labels)


# ---------------------------------------------------------------------------
# Morphology
# ---------------------------------------------------------------------------


def morphology(img: BinaryImage, op: str, k: int = 3) -> BinaryImage:
    """Set morphology with a k x k square element (edge replication)."""
    if k < 1:
        raise ValueError(f"structuring size must be >= 1, got {k}")
    img = as_binary(img)
    if op == "dilate":
        return ndimage.maximum_filter(img, size=k, mode="nearest")
    if op == "erode":
        return ndimage.minimum_filter(img, size=k, mode="nearest")
    if op == "close":
        return morphology(morphology(img, "dilate", k), "erode", k)
    raise ValueError(f"unknown morphology op {op!r}")


# ---------------------------------------------------------------------------
# Skeletonization (Zhang-Suen style iterative thinning)
# ---------------------------------------------------------------------------


def _neighbours(padded):
    """P2..P9 clockwise from north, as views of the padded array."""
    return [
        padded[0:-2, 1:-1],  # N
        padded[0:-2, 2:],    # NE
        padded[1:-1, 2:],    # E
        padded[2:, 2:],      # SE
        padded[2:, 1:-1],    # S
        padded[2:, 0:-2],    # SW
        padded[1:-1, 0:-2],  # W
        padded[0:-2, 0:-2],  # NW
    ]


def skeletonize(img: BinaryImage) -> BinaryImage:
    """Thin strokes to (near) single-pixel lines, preserving connectivity."""
    mask = as_binary(img)
    sk = mask.astype(np.uint8).copy()
    while True:
        changed = False
        for phase in (0, 1):
            padded = np.pad(sk, 1, mode="constant")
            p = _neighbours(padded)
            b = sum(x.astype(np.int32) for x in p)
            ring = p + [p[0]]
            a = sum(((ring[i] == 0) & (ring[i + 1] == 1)) for i in range(8))
            cond = (sk == 1) & (b >= 2) & (b <= 6) & (a == 1)
            if phase == 0:
                cond &= (p[0] * p[2] * p[4] == 0) & (p[2] * p[4] * p[6] == 0)
            else:
                cond &= (p[0] * p[2] * p[6] == 0) & (p[0] * p[4] * p[6] == 0)
            if cond.any():
                sk[cond] = 0
                changed = True
        if not changed:
            break
    _extend_endpoints(sk, mask)
    return sk.astype(bool)


def prune_spurs(img: BinaryImage, max_len: int = 5) -> BinaryImage:
    """Remove dead-end branches of length <= max_len that hang off a
    junction.

    Skeletons of noisy stroke bands sprout short spurs at junctions.
    Long open strokes (paragraph lines, squiggles) end without a nearby
    junction and are kept intact; closed rings have no endpoints at all.
    """
    sk = as_binary(img).copy()
    height, width = sk.shape

    def neighbours_of(y, x):
        out = []
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                ny, nx = y + dy, x + dx
                if 0 <= ny < height and 0 <= nx < width and sk[ny, nx]:
                    out.append((ny, nx))
        return out

    changed = True
    while changed:
        changed = False
        padded = np.pad(sk, 1, mode="constant")
        counts = sum(x.astype(np.int32) for x in _neighbours(padded))
        ys, xs = np.nonzero(sk & (counts == 1))
        for y, x in zip(ys.tolist(), xs.tolist()):
            if not sk[y, x]:
                continue
            walk = [(y, x)]
            prev = None
            cy, cx = y, x
            hit_junction = False
            for _ in range(max_len):
                nbrs = [p for p in neighbours_of(cy, cx) if p != prev]
                if len(nbrs) != 1:
                    hit_junction = len(nbrs) > 1
                    break
                prev = (cy, cx)
                cy, cx = nbrs[0]
                if len(neighbours_of(cy, cx)) > 2:
                    hit_junction = True
                    break
                walk.append((cy, cx))
            if hit_junction:
                for wy, wx in walk:
                    sk[wy, wx] = False
                changed = True
    return sk


def _extend_endpoints(sk: np.ndarray, mask: np.ndarray) -> None:
    """Grow line ends back out to the original stroke extent.

    Thinning eats roughly half the stroke thickness off each blunt line
    end; walking each endpoint straight ahead while the source mask still
    has ink restores the lost length without adding spurs.
    """
    height, width = sk.shape
    for _ in range(max(height, width)):
        padded = np.pad(sk, 1, mode="constant")
        counts = sum(x.astype(np.int32) for x in _neighbours(padded))
        ys, xs = np.nonzero((sk == 1) & (counts == 1))
        grown = False
        for y, x in zip(ys.tolist(), xs.tolist()):
            y0, y1 = max(0, y - 1), min(height, y + 2)
            x0, x1 = max(0, x - 1), min(width, x + 2)
            window = sk[y0:y1, x0:x1]
            neigh = np.argwhere(window)
            neigh = [tuple(q) for q in neigh if (y0 + q[0], x0 + q[1]) != (y, x)]
            if len(neigh) != 1:
                continue
            dy = y - (y0 + neigh[0][0])
            dx = x - (x0 + neigh[0][1])
            ty, tx = y + dy, x + dx
            if 0 <= ty < height and 0 <= tx < width and mask[ty, tx] and not sk[ty, tx]:
                sk[ty, tx] = 1
                grown = True
        if not grown:
            return


# ---------------------------------------------------------------------------
# Perspective warping
# ---------------------------------------------------------------------------


def homography_from_points(src_pts, dst_pts) -> np.ndarray:
    """3x3 homography mapping each src point onto its dst point."""
    src = np.asarray(src_pts, dtype=np.float64)
    dst = np.asarray(dst_pts, dtype=np.float64)
    if src.shape != (4, 2) or dst.shape != (4, 2):
        raise ValueError("need exactly 4 source and 4 destination points")
    rows = []
    rhs = []
    for (sx, sy), (dx, dy) in zip(src, dst):
        rows.append([sx, sy, 1, 0, 0, 0, -dx * sx, -dx * sy])
        rows.append([0, 0, 0, sx, sy, 1, -dy * sx, -dy * sy])
        rhs.extend([dx, dy])
    coeffs = np.linalg.solve(np.asarray(rows), np.asarray(rhs))
    return np.append(coeffs, 1.0).reshape(3, 3)


def _quad_degenerate(quad: np.ndarray) -> bool:
    # any three collinear corners make the homography singular
    for i in range(4):
        a, b, c = quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(cross) < 1e-9:
            return True
    return False


def warp_perspective(img: RgbImage, quad, out_w: int, out_h: int) -> RgbImage:
    """Map the quad (TL, TR, BR, BL source corners) onto an out_w x out_h rect.

    Sampling is bilinear with edge clamping.
    """
    img = as_rgb(img)
    quad = np.asarray(quad, dtype=np.float64)
    if _quad_degenerate(quad):
        raise ValueError("degenerate quad: three corners are collinear")
    dst = np.array([[0, 0], [out_w - 1, 0], [out_w - 1, out_h - 1], [0, out_h - 1]], dtype=np.float64)
    h_inv = homography_from_points(dst, quad)

    ys, xs = np.mgrid[0:out_h, 0:out_w]
    ones = np.ones_like(xs)
    pts = np.stack([xs, ys, ones], axis=0).reshape(3, -1)
    mapped = h_inv @ pts
    sx = (mapped[0] / mapped[2]).reshape(out_h, out_w)
    sy = (mapped[1] / mapped[2]).reshape(out_h, out_w)

    height, width = img.shape[:2]
    sx = np.clip(sx, 0, width - 1)
    sy = np.clip(sy, 0, height - 1)
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = (sx - x0)[..., None]
    fy = (sy - y0)[..., None]

    src = img.astype(np.float64)
    top = src[y0, x0] * (1 - fx) + src[y0, x1] * fx
    bot = src[y1, x0] * (1 - fx) + src[y1, x1] * fx
    out = top * (1 - fy) + bot * fy
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
