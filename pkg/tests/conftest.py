"""Independent reference implementations used as test oracles.

Nothing here imports the package's kernels: the flood fill, the
point-to-segment distance and the fixed-point solver are written from the
definitions so they can check the optimised code.
"""

from collections import deque

import numpy as np
import pytest

N4 = [(-1, 0), (1, 0), (0, -1), (0, 1)]
N8 = N4 + [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def flood_fill_labels(img, connectivity=8):
    """BFS labeling; labels numbered in raster order of their first pixel."""
    img = np.asarray(img)
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.int64)
    nbrs = N8 if connectivity == 8 else N4
    k = 0
    for y0 in range(h):
        for x0 in range(w):
            if img[y0, x0] != 1 or out[y0, x0]:
                continue
            k += 1
            out[y0, x0] = k
            q = deque([(y0, x0)])
            while q:
                y, x = q.popleft()
                for dy, dx in nbrs:
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and img[yy, xx] == 1 and not out[yy, xx]:
                        out[yy, xx] = k
                        q.append((yy, xx))
    return out, k


def partition(labels):
    """Label map as a set of frozensets of flat pixel indices (numbering-free)."""
    flat = np.asarray(labels).ravel()
    groups = {}
    for idx, lab in enumerate(flat):
        if lab:
            groups.setdefault(int(lab), []).append(idx)
    return {frozenset(v) for v in groups.values()}


def enclosed_regions(ink, connectivity=8):
    """Empty-space components (ink == 0) not touching the border, as pixel sets."""
    lab, k = flood_fill_labels(1 - np.asarray(ink), connectivity)
    h, w = lab.shape
    border = set(lab[0].tolist()) | set(lab[-1].tolist()) | set(lab[:, 0].tolist()) | set(lab[:, -1].tolist())
    out = []
    for i in range(1, k + 1):
        if i in border:
            continue
        ys, xs = np.nonzero(lab == i)
        out.append((len(xs), (int(xs.min()), int(ys.min()), int(xs.max() - xs.min() + 1),
                              int(ys.max() - ys.min() + 1))))
    return out


def point_segment_distance(px, py, ax, ay, bx, by):
    abx, aby = bx - ax, by - ay
    den = abx * abx + aby * aby
    if den == 0:
        return float(np.hypot(px - ax, py - ay))
    t = max(0.0, min(1.0, ((px - ax) * abx + (py - ay) * aby) / den))
    return float(np.hypot(px - (ax + t * abx), py - (ay + t * aby)))


def fr_balance(ratio, lo=1.0 + 1e-12, hi=100.0):
    """Root of ln(d) * d^2 = ratio by bisection (the left side is increasing on d > 1)."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.log(mid) * mid * mid < ratio:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ring_image(size, x0, y0, side_w, side_h, thickness=1):
    """Binary image (ink = 1) with a rectangular frame; interior is side_w x side_h."""
    img = np.zeros((size, size), dtype=np.uint8)
    img[y0 - thickness:y0 + side_h + thickness, x0 - thickness:x0 + side_w + thickness] = 1
    img[y0:y0 + side_h, x0:x0 + side_w] = 0
    return img


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)
