"""Border following on binary images (Suzuki & Abe's raster-scan scheme).

Foreground is 8-connected and background 4-connected. Each border is found
at its first pixel in raster order and then followed until the starting
configuration recurs; followed pixels are marked in a working copy of the
image so no border is traced twice. Points are reported clockwise on
screen (y pointing down). Outer borders surround foreground components;
hole borders surround background regions enclosed by them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .validation import check_binary_image

__all__ = ["Contour", "trace_contours", "contour_area", "contour_perimeter",
           "bounding_rect", "pixel_area", "contours_to_json"]

# Neighbour offsets, clockwise on screen (y grows downward), starting east.
_DY = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)
_DX = np.array([1, 1, 0, -1, -1, -1, 0, 1], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed border as an ordered (k, 2) array of ``(x, y)`` pixels.

    The closing step from the last point back to the first is implicit.
    ``parent`` is the index of the enclosing border in the list returned by
    :func:`trace_contours`, or -1 when the enclosing border is the image
    frame.
    """

    points: np.ndarray = field(repr=False)
    is_outer: bool
    parent: int = -1

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        kind = "outer" if self.is_outer else "hole"
        return f"Contour({kind}, n_points={len(self.points)}, parent={self.parent})"


# Direction index of an offset, looked up at (dy + 1) * 3 + (dx + 1).
_DIR_OF = np.full(9, -1, dtype=np.int64)
for _k in range(8):
    _DIR_OF[(_DY[_k] + 1) * 3 + _DX[_k] + 1] = _k


@numba.njit(cache=True, nogil=True)
def _dir_index(dy, dx):
    return _DIR_OF[(dy + 1) * 3 + dx + 1]


@numba.njit(cache=True, nogil=True)
def _grow(buf, need):
    cap = buf.shape[0]
    if need <= cap:
        return buf
    new_cap = max(2 * cap, need)
    out = np.empty(new_cap, dtype=buf.dtype)
    out[:cap] = buf
    return out


@numba.njit(cache=True, nogil=True)
def _follow(f, px, py, n_pts, nbd, i, j, i1, j1, i2, j2, i3, j3):
    """Advance a border walk until it closes or the point buffers fill up.

    ``(i3, j3)`` is the current pixel and ``(i2, j2)`` the previous one.
    Returns the updated count, whether the border closed, and the walk
    state to resume from.
    """
    cap = px.shape[0]
    while n_pts < cap:
        d = _dir_index(i2 - i3, j2 - j3)
        east_zero = False
        i4 = i3
        j4 = j3
        for k in range(1, 9):
            dd = (d - k) & 7
            yy = i3 + _DY[dd]
            xx = j3 + _DX[dd]
            if f[yy, xx] != 0:
                i4 = yy
                j4 = xx
                break
            if dd == 0:
                east_zero = True
        if east_zero:
            f[i3, j3] = -nbd
        elif f[i3, j3] == 1:
            f[i3, j3] = nbd
        px[n_pts] = j3 - 1
        py[n_pts] = i3 - 1
        n_pts += 1
        if i4 == i and j4 == j and i3 == i1 and j3 == j1:
            return n_pts, True, i2, j2, i3, j3
        i2 = i3
        j2 = j3
        i3 = i4
        j3 = j4
    return n_pts, False, i2, j2, i3, j3


@numba.njit(cache=True, nogil=True)
def _suzuki(img, f):
    h, w = img.shape
    # f is the (h + 2, w + 2) working image: img framed by a zero border
    f[0, :] = 0
    f[h + 1, :] = 0
    for i in range(h):
        dst = f[i + 1]
        src = img[i]
        dst[0] = 0
        dst[w + 1] = 0
        for j in range(w):
            dst[j + 1] = src[j]

    px = np.empty(4 * (h + w) + 1024, dtype=np.int32)
    py = np.empty(4 * (h + w) + 1024, dtype=np.int32)
    n_pts = 0
    # per-border records, indexed by NBD; NBD 1 is the frame (a hole border)
    starts = np.empty(1024, dtype=np.int64)
    outer = np.empty(1024, dtype=np.bool_)
    parent = np.empty(1024, dtype=np.int64)
    outer[1] = False
    parent[1] = 0
    nbd = 1

    for i in range(1, h + 1):
        lnbd = 1
        for j in range(1, w + 1):
            fij = f[i, j]
            if fij == 0:
                continue
            if fij == 1 and f[i, j - 1] == 0:
                is_outer = True
                i2 = i
                j2 = j - 1
            elif fij >= 1 and f[i, j + 1] == 0:
                is_outer = False
                i2 = i
                j2 = j + 1
                if fij > 1:
                    lnbd = fij
            else:
                if fij != 1:
                    lnbd = abs(fij)
                continue

            nbd += 1
            if nbd >= starts.shape[0]:
                starts = _grow(starts, nbd + 1)
                outer = _grow(outer, nbd + 1)
                parent = _grow(parent, nbd + 1)
            outer[nbd] = is_outer
            # the border last met on this row decides the parent
            if is_outer == outer[lnbd]:
                parent[nbd] = parent[lnbd]
            else:
                parent[nbd] = lnbd
            starts[nbd] = n_pts

            d0 = _dir_index(i2 - i, j2 - j)
            found = -1
            for k in range(8):
                d = (d0 + k) & 7
                if f[i + _DY[d], j + _DX[d]] != 0:
                    found = d
                    break
            if found < 0:
                # isolated pixel
                f[i, j] = -nbd
                px = _grow(px, n_pts + 1)
                py = _grow(py, n_pts + 1)
                px[n_pts] = j - 1
                py[n_pts] = i - 1
                n_pts += 1
            else:
                i1 = i + _DY[found]
                j1 = j + _DX[found]
                i2 = i1
                j2 = j1
                i3 = i
                j3 = j
                done = False
                while not done:
                    # Buffers only grow between chunks so the follow loop
                    # below never reassigns them.
                    if n_pts >= px.shape[0]:
                        px = _grow(px, n_pts + 1)
                        py = _grow(py, n_pts + 1)
                    n_pts, done, i2, j2, i3, j3 = _follow(f, px, py, n_pts, nbd,
                                                          i, j, i1, j1, i2, j2, i3, j3)
            if f[i, j] != 1:
                lnbd = abs(f[i, j])

    n_borders = nbd - 1
    offsets = np.empty(n_borders + 1, dtype=np.int64)
    for b in range(n_borders):
        offsets[b] = starts[b + 2]
    offsets[n_borders] = n_pts
    # The walk above runs counterclockwise on screen; reverse everything
    # after the start pixel so contours come out clockwise.
    for b in range(n_borders):
        lo = offsets[b] + 1
        hi = offsets[b + 1] - 1
        while lo < hi:
            px[lo], px[hi] = px[hi], px[lo]
            py[lo], py[hi] = py[hi], py[lo]
            lo += 1
            hi -= 1
    # contour index = nbd - 2; the frame maps to -1
    par = np.empty(n_borders, dtype=np.int64)
    for b in range(n_borders):
        par[b] = parent[b + 2] - 2 if parent[b + 2] >= 2 else -1
    return px[:n_pts], py[:n_pts], offsets, outer[2:nbd + 1].copy(), par


def _trace_raw(img: np.ndarray):
    """Jitted tracer output: xs, ys, offsets, is_outer, parent."""
    h, w = img.shape
    # Allocated by numpy rather than inside the kernel so large buffers get
    # the same (huge-page) allocator as the CCL label map.
    work = np.empty((h + 2, w + 2), dtype=np.int32)
    return _suzuki(img, work)


def trace_contours(img) -> list[Contour]:
    """Follow every border of ``img``; contours are returned in discovery order."""
    img = check_binary_image(img)
    xs, ys, offsets, outer, parent = _trace_raw(img)
    pts = np.stack([xs, ys], axis=1).astype(np.int64)
    return [Contour(pts[offsets[b]:offsets[b + 1]], bool(outer[b]), int(parent[b]))
            for b in range(len(outer))]


@numba.njit(cache=True, nogil=True)
def _shoelace(xs, ys):
    n = xs.shape[0]
    s = 0
    for k in range(n):
        k1 = k + 1 if k + 1 < n else 0
        s += xs[k] * ys[k1] - xs[k1] * ys[k]
    return s


def _as_points(c) -> np.ndarray:
    pts = c.points if isinstance(c, Contour) else np.asarray(c)
    return np.asarray(pts, dtype=np.int64).reshape(-1, 2)


def contour_area(c) -> float:
    """Absolute shoelace area of the contour polygon, in square pixels."""
    pts = _as_points(c)
    if len(pts) < 3:
        return 0.0
    return abs(int(_shoelace(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])))) / 2.0


def contour_perimeter(c) -> int:
    """Number of steps in the closed walk (0 for a single pixel)."""
    n = len(_as_points(c))
    return 0 if n < 2 else n


def pixel_area(c) -> float:
    """Pixel count of the region bounded by an outer contour.

    Pick's theorem over the traced walk: shoelace area plus half the
    number of boundary steps plus one. Exact for regions without holes,
    thin necks included, since a neck traversed out and back adds zero
    shoelace area and two boundary steps per pixel.
    """
    return contour_area(c) + contour_perimeter(c) / 2.0 + 1.0


def bounding_rect(c) -> tuple[int, int, int, int]:
    """Smallest axis-aligned ``(x, y, width, height)`` covering the contour."""
    pts = _as_points(c)
    if len(pts) == 0:
        raise ValueError("empty contour")
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    return int(x0), int(y0), int(x1 - x0 + 1), int(y1 - y0 + 1)


def contours_to_json(contours: list[Contour]) -> list[dict]:
    return [{"is_outer": c.is_outer, "parent": c.parent, "points": c.points.tolist()}
            for c in contours]
