"""Rendering layouts to images, thresholding, and bit-exact PGM I/O.

Graph ink is black (0) on a white (255) background. Node positions are
shifted by a margin of ``node_radius_px + 1`` pixels and rounded half-up
to pixel centres; edges are the set of pixels whose centre lies within a
fixed half-width of the segment joining two rounded endpoints.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ImageFormatError
from .validation import check_binary_image, check_gray_image, check_positions

__all__ = [
    "RasterParams",
    "rasterize",
    "render_binary",
    "threshold",
    "invert",
    "write_pgm",
    "read_pgm",
    "write_png",
    "labels_to_gray",
    "pixel_positions",
    "ink_half_width",
]


@dataclass(frozen=True)
class RasterParams:
    threshold: int = 128
    node_radius_px: int = 2
    line_thickness_px: int = 1
    supersample: int = 1

    def __post_init__(self):
        if not 0 <= self.threshold <= 255:
            raise ValueError("threshold must lie in [0, 255]")
        for name in ("node_radius_px", "line_thickness_px", "supersample"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def margin(self) -> int:
        return self.node_radius_px + 1


def ink_half_width(thickness_px: float) -> float:
    """Distance from a segment within which a pixel centre is inked.

    Anything at or above sqrt(2)/2 makes every segment 4-connected, which
    is what keeps 8-connected empty space from leaking through diagonal
    lines. Thickness 1 gives 0.75: exactly one pixel row for axis-aligned
    segments.
    """
    return (thickness_px + 0.5) / 2.0


def _round_half_up(v: np.ndarray) -> np.ndarray:
    return np.floor(v + 0.5).astype(np.int64)


def pixel_positions(positions, margin: int) -> np.ndarray:
    """Integer ``(x, y)`` pixel of every node for the given margin."""
    return _round_half_up(check_positions(positions)) + margin


def image_shape(canvas_width: float, canvas_height: float, margin: int) -> tuple[int, int]:
    """``(height, width)`` of the image holding a canvas plus margins."""
    return (int(math.ceil(canvas_height)) + 2 * margin + 1,
            int(math.ceil(canvas_width)) + 2 * margin + 1)


@numba.njit(cache=True, nogil=True)
def _seg_dist2(px, py, x0, y0, x1, y1):
    dx = x1 - x0
    dy = y1 - y0
    den = dx * dx + dy * dy
    if den == 0.0:
        ex = px - x0
        ey = py - y0
        return ex * ex + ey * ey
    t = ((px - x0) * dx + (py - y0) * dy) / den
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    ex = px - (x0 + t * dx)
    ey = py - (y0 + t * dy)
    return ex * ex + ey * ey


@numba.njit(cache=True, nogil=True)
def _draw_segment(img, x0, y0, x1, y1, half):
    h, w = img.shape
    r2 = half * half
    pad = int(math.ceil(half))
    dx = x1 - x0
    dy = y1 - y0
    if abs(dx) >= abs(dy):
        if dx == 0:
            xa, xb = x0 - pad, x0 + pad
        else:
            xa, xb = min(x0, x1) - pad, max(x0, x1) + pad
        slope = dy / dx if dx != 0 else 0.0
        span = half * math.sqrt(1.0 + slope * slope) + 1.0
        for x in range(max(xa, 0), min(xb, w - 1) + 1):
            xc = min(max(x, min(x0, x1)), max(x0, x1))
            yc = y0 + (xc - x0) * slope
            ya = int(math.floor(yc - span))
            yb = int(math.ceil(yc + span))
            for y in range(max(ya, 0), min(yb, h - 1) + 1):
                if _seg_dist2(float(x), float(y), float(x0), float(y0),
                              float(x1), float(y1)) <= r2:
                    img[y, x] = 0
    else:
        ya, yb = min(y0, y1) - pad, max(y0, y1) + pad
        slope = dx / dy
        span = half * math.sqrt(1.0 + slope * slope) + 1.0
        for y in range(max(ya, 0), min(yb, h - 1) + 1):
            yc = min(max(y, min(y0, y1)), max(y0, y1))
            xc = x0 + (yc - y0) * slope
            xa = int(math.floor(xc - span))
            xb = int(math.ceil(xc + span))
            for x in range(max(xa, 0), min(xb, w - 1) + 1):
                if _seg_dist2(float(x), float(y), float(x0), float(y0),
                              float(x1), float(y1)) <= r2:
                    img[y, x] = 0


@numba.njit(cache=True, nogil=True)
def _draw_disk(img, cx, cy, radius):
    h, w = img.shape
    r2 = radius * radius
    for y in range(max(cy - radius, 0), min(cy + radius, h - 1) + 1):
        for x in range(max(cx - radius, 0), min(cx + radius, w - 1) + 1):
            if (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2:
                img[y, x] = 0


@numba.njit(cache=True, nogil=True)
def _draw_graph(img, pix, edges, half, radius):
    for e in range(edges.shape[0]):
        u = edges[e, 0]
        v = edges[e, 1]
        _draw_segment(img, pix[u, 0], pix[u, 1], pix[v, 0], pix[v, 1], half)
    for i in range(pix.shape[0]):
        _draw_disk(img, pix[i, 0], pix[i, 1], radius)


def _canvas_of(layout) -> tuple[float, float]:
    return float(layout.canvas_width), float(layout.canvas_height)


def rasterize(layout, topology, params: RasterParams = RasterParams()) -> np.ndarray:
    """Draw ``topology`` at the positions of ``layout`` as a uint8 image.

    ``layout`` is anything with ``positions``, ``canvas_width`` and
    ``canvas_height`` attributes (a fitted :class:`~fdccl.layout.Layout` or
    a ground-truth placement scaled to a canvas). With ``supersample`` s > 1
    the drawing is made at s-times resolution and block-averaged down,
    which yields intermediate grey levels.
    """
    positions = check_positions(layout.positions, topology.node_count)
    cw, ch = _canvas_of(layout)
    s = int(params.supersample)
    margin = params.margin
    h, w = image_shape(cw, ch, margin)
    edges = np.ascontiguousarray(topology.edges, dtype=np.int64)
    if s == 1:
        img = np.full((h, w), 255, dtype=np.uint8)
        pix = pixel_positions(positions, margin)
        _draw_graph(img, pix, edges, ink_half_width(params.line_thickness_px),
                    params.node_radius_px)
        return img
    big = np.full((h * s, w * s), 255, dtype=np.uint8)
    pix = _round_half_up((positions + margin) * s + (s - 1) / 2.0)
    _draw_graph(big, pix, edges, ink_half_width(params.line_thickness_px * s),
                params.node_radius_px * s)
    blocks = big.reshape(h, s, w, s).astype(np.uint32).sum(axis=(1, 3))
    return ((blocks + (s * s) // 2) // (s * s)).astype(np.uint8)


def threshold(img, theta: int = 128) -> np.ndarray:
    """Binary image with 1 exactly where intensity is strictly above ``theta``."""
    if not 0 <= theta <= 255:
        raise ValueError("theta must lie in [0, 255]")
    gray = check_gray_image(img)
    return (gray > theta).astype(np.uint8)


def invert(img) -> np.ndarray:
    return (1 - check_binary_image(img)).astype(np.uint8)


def render_binary(layout, topology, params: RasterParams = RasterParams()) -> np.ndarray:
    """Rasterize then threshold, with ink mapped to 1.

    Thresholding yields 1 for the white background; the detectors expect
    ink as 1, hence the final inversion.
    """
    return invert(threshold(rasterize(layout, topology, params), params.threshold))


# ------------------------------------------------------------------ PGM / PNG

def write_pgm(img, path, *, binary: bool = False) -> None:
    """Write a P5 PGM with maxval 255.

    With ``binary=True`` the input must be a 0/1 image and is stored as
    0 -> 0, 1 -> 255.
    """
    if binary:
        data = check_binary_image(img) * np.uint8(255)
    else:
        data = check_gray_image(img)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def _header_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    tokens: list[bytes] = []
    pos = 0
    n = len(buf)
    while len(tokens) < count:
        while pos < n and buf[pos] in b" \t\r\n":
            pos += 1
        if pos < n and buf[pos:pos + 1] == b"#":
            while pos < n and buf[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and buf[pos] not in b" \t\r\n#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= n or buf[pos] not in b" \t\r\n":
        raise ImageFormatError("malformed PGM header")
    return tokens, pos + 1


def read_pgm(path, *, binary: bool = False) -> np.ndarray:
    """Read a P5 PGM written by :func:`write_pgm` (or any 8-bit P5 file).

    With ``binary=True`` every pixel must be 0 or 255 and the result is the
    0/1 image.
    """
    with open(path, "rb") as fh:
        buf = fh.read()
    tokens, offset = _header_tokens(buf, 4)
    if tokens[0] != b"P5":
        raise ImageFormatError(f"{os.fspath(path)}: not a binary PGM (magic {tokens[0]!r})")
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError(f"{os.fspath(path)}: non-numeric PGM header field") from None
    if w < 1 or h < 1:
        raise ImageFormatError(f"{os.fspath(path)}: bad dimensions {w}x{h}")
    if maxval != 255:
        raise ImageFormatError(f"{os.fspath(path)}: unsupported maxval {maxval}, only 255 is supported")
    payload = buf[offset:offset + w * h]
    if len(payload) < w * h:
        raise ImageFormatError(f"{os.fspath(path)}: truncated payload ({len(payload)} of {w * h} bytes)")
    img = np.frombuffer(payload, dtype=np.uint8).reshape(h, w).copy()
    if not binary:
        return img
    if not np.all((img == 0) | (img == 255)):
        raise ImageFormatError(f"{os.fspath(path)}: binary PGM must contain only 0 and 255")
    return (img == 255).astype(np.uint8)


def write_png(img, path) -> None:
    """8-bit PNG for viewing: grey (H, W) or RGB (H, W, 3) uint8 arrays."""
    from PIL import Image

    arr = np.asarray(img, dtype=np.uint8)
    Image.fromarray(arr).save(path)


def labels_to_gray(labels) -> np.ndarray:
    """Map a label map to grey levels: 0 stays black, labels cycle 1..255."""
    lab = np.asarray(labels, dtype=np.int64)
    out = np.zeros(lab.shape, dtype=np.uint8)
    fg = lab > 0
    out[fg] = ((lab[fg] * 97) % 255 + 1).astype(np.uint8)
    return out
