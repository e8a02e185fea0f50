"""Border following with hole/outer hierarchy, plus polygon simplification.

The tracer follows Suzuki & Abe's raster-scan border labelling: every
outer border and every hole border is extracted once, each with a link to
its parent border, in deterministic top-left-first scan order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .raster import BinaryImage, as_binary

# 8-neighbourhood, counterclockwise starting east, as (di, dj)
_DIRS = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))


@dataclass
class Contour:
    """One traced border: pixel points in (x, y), hierarchy via parent index."""

    points: np.ndarray  # (N, 2) int32, consecutive points 8-connected
    is_outer: bool
    parent: Optional[int] = None

    @property
    def bbox(self):
        """Pixel rect (x, y, w, h) covering the contour."""
        xs = self.points[:, 0]
        ys = self.points[:, 1]
        x0, y0 = int(xs.min()), int(ys.min())
        return (x0, y0, int(xs.max()) - x0 + 1, int(ys.max()) - y0 + 1)


def trace_contours(img: BinaryImage) -> list[Contour]:
    """All outer and hole borders of the foreground, with parent links."""
    src = as_binary(img)
    height, width = src.shape
    f = np.zeros((height + 2, width + 2), dtype=np.int32)
    f[1 : height + 1, 1 : width + 1] = src

    # border 1 is the virtual frame (a hole border in the hierarchy table)
    nbd = 1
    is_outer = {1: False}
    parent_nbd = {1: 0}
    traces: list[tuple[int, list]] = []

    def follow(i: int, j: int, i2: int, j2: int, born: int) -> None:
        # 3.1: first nonzero neighbour clockwise from (i2, j2)
        start_dir = _DIRS.index((i2 - i, j2 - j))
        first = None
        for k in range(8):
            di, dj = _DIRS[(start_dir - k) % 8]
            if f[i + di, j + dj] != 0:
                first = (i + di, j + dj)
                break
        if first is None:
            f[i, j] = -born
            traces.append((born, [(j - 1, i - 1)]))
            return

        points = []
        i1, j1 = first
        i2, j2 = i1, j1
        i3, j3 = i, j
        while True:
            # 3.3: next nonzero neighbour counterclockwise after (i2, j2)
            d = _DIRS.index((i2 - i3, j2 - j3))
            east_zero_examined = False
            for k in range(1, 9):
                di, dj = _DIRS[(d + k) % 8]
                if f[i3 + di, j3 + dj] != 0:
                    i4, j4 = i3 + di, j3 + dj
                    break
                if (di, dj) == (0, 1):
                    east_zero_examined = True
            # 3.4
            if east_zero_examined:
                f[i3, j3] = -born
            elif f[i3, j3] == 1:
                f[i3, j3] = born
            points.append((j3 - 1, i3 - 1))
            # 3.5
            if (i4, j4) == (i, j) and (i3, j3) == (i1, j1):
                break
            i2, j2 = i3, j3
            i3, j3 = i4, j4
        traces.append((born, points))

    for i in range(1, height + 1):
        lnbd = 1
        row = f[i]
        candidates = np.flatnonzero(row[1 : width + 1]) + 1
        for j in candidates:
            j = int(j)
            v = f[i, j]
            if v == 1 and f[i, j - 1] == 0:
                # outer border start
                nbd += 1
                is_outer[nbd] = True
                ref = lnbd
                parent_nbd[nbd] = parent_nbd[ref] if is_outer[ref] else ref
                follow(i, j, i, j - 1, nbd)
            elif v >= 1 and f[i, j + 1] == 0:
                # hole border start
                nbd += 1
                is_outer[nbd] = False
                if v > 1:
                    lnbd = v
                ref = lnbd
                parent_nbd[nbd] = ref if is_outer[ref] else parent_nbd[ref]
                follow(i, j, i, j + 1, nbd)
            if f[i, j] != 1:
                lnbd = abs(f[i, j])

    index_of = {born: idx for idx, (born, _) in enumerate(traces)}
    out = []
    for born, points in traces:
        par = parent_nbd[born]
        out.append(
            Contour(
                points=np.asarray(points, dtype=np.int32),
                is_outer=is_outer[born],
                parent=index_of.get(par),
            )
        )
    return out


def contour_children(contours: list[Contour]) -> list[list[int]]:
    """Child index lists aligned with ``contours``."""
    kids: list[list[int]] = [[] for _ in contours]
    for idx, c in enumerate(contours):
        if c.parent is not None:
            kids[c.parent].append(idx)
    return kids


# ---------------------------------------------------------------------------
# Douglas-Peucker simplification
# ---------------------------------------------------------------------------


def _perp_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    norm = np.hypot(*ab)
    if norm < 1e-12:
        return np.hypot(points[:, 0] - a[0], points[:, 1] - a[1])
    cross = (points[:, 0] - a[0]) * ab[1] - (points[:, 1] - a[1]) * ab[0]
    return np.abs(cross) / norm


def _dp_chain(points: np.ndarray, tol: float) -> list[int]:
    """Indices of kept vertices for an open chain (endpoints always kept)."""
    keep = [0, len(points) - 1]
    stack = [(0, len(points) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        seg = points[lo + 1 : hi]
        d = _perp_distances(seg.astype(np.float64), points[lo].astype(np.float64), points[hi].astype(np.float64))
        k = int(np.argmax(d))
        if d[k] > tol:
            mid = lo + 1 + k
            keep.append(mid)
            stack.append((lo, mid))
            stack.append((mid, hi))
    return sorted(set(keep))


def approx_polygon(contour, eps: float = 0.02) -> np.ndarray:
    """Douglas-Peucker simplification with tolerance eps x perimeter.

    Treats the contour as a closed curve; degenerate contours (< 3 points)
    are returned unchanged.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    points = contour.points if isinstance(contour, Contour) else np.asarray(contour)
    if len(points) < 3:
        return points.copy()

    closed = np.vstack([points, points[:1]]).astype(np.float64)
    perimeter = np.hypot(*np.diff(closed, axis=0).T).sum()
    tol = eps * perimeter

    # split the closed curve at the point farthest from the scan-start anchor
    far = int(np.argmax(np.hypot(points[:, 0] - points[0, 0], points[:, 1] - points[0, 1])))
    if far == 0:
        return points[:1].copy()
    first = points[: far + 1]
    second = np.vstack([points[far:], points[:1]])
    idx1 = _dp_chain(first, tol)
    idx2 = _dp_chain(second, tol)
    verts = [first[i] for i in idx1[:-1]] + [second[i] for i in idx2[:-1]]
    verts = np.asarray(verts)

    # anchors can land mid-edge; prune vertices that are collinear with their
    # neighbours at the same tolerance
    changed = True
    while changed and len(verts) > 3:
        changed = False
        for i in range(len(verts)):
            a = verts[(i - 1) % len(verts)].astype(np.float64)
            b = verts[(i + 1) % len(verts)].astype(np.float64)
            d = _perp_distances(verts[i : i + 1].astype(np.float64), a, b)[0]
            if d <= tol:
                verts = np.delete(verts, i, axis=0)
                changed = True
                break
    return verts


def polygon_area(vertices: np.ndarray) -> float:
    """Absolute shoelace area of a polygon given as (N, 2) vertices."""
    if len(vertices) < 3:
        return 0.0
    x = vertices[:, 0].astype(np.float64)
    y = vertices[:, 1].astype(np.float64)
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
