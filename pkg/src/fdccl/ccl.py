"""Two-pass connected component labeling.

First pass: raster scan assigning provisional labels from the already
visited neighbours and recording label equivalences in a union-find.
Second pass: resolve each provisional label to its root, renumber roots
densely in first-encounter order and accumulate per-component statistics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

from .unionfind import uf_find, uf_union
from .validation import check_binary_image

__all__ = ["Connectivity", "ComponentStats", "ccl_two_pass", "component_stats", "label_components"]


class Connectivity(enum.IntEnum):
    FOUR = 4
    EIGHT = 8

    @classmethod
    def coerce(cls, value) -> "Connectivity":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().upper()
            aliases = {"4": "FOUR", "8": "EIGHT"}
            return cls[aliases.get(key, key)]
        return cls(int(value))


@dataclass(frozen=True)
class ComponentStats:
    label: int
    area: int
    bbox: tuple[int, int, int, int]  # x, y, width, height
    centroid: tuple[float, float]
    touches_border: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "area": self.area,
            "bbox": list(self.bbox),
            "centroid": list(self.centroid),
            "touches_border": self.touches_border,
        }


@numba.njit(cache=True, nogil=True)
def _first_pass(img, labels, parent, size, eight):
    h, w = img.shape
    next_label = 1
    for y in range(h):
        row = img[y]
        cur = labels[y]
        prev = labels[y - 1] if y > 0 else labels[y]
        lw = 0  # label of the west pixel, carried along the row
        for x in range(w):
            if row[x] == 0:
                cur[x] = 0
                lw = 0
                continue
            ln = prev[x] if y > 0 else 0
            if not eight:
                if ln != 0:
                    lab = ln
                    if lw != 0 and lw != ln:
                        # rule 3: two labels meet; keep the smaller
                        if lw < ln:
                            lab = lw
                        uf_union(parent, size, lw, ln)
                elif lw != 0:
                    lab = lw  # rule 2
                else:
                    # rule 1: no labelled neighbour
                    lab = next_label
                    parent[lab] = lab
                    size[lab] = 1
                    next_label += 1
                cur[x] = lab
                lw = lab
                continue

            # With 8-connectivity the neighbours are tested in an order that
            # avoids redundant work. When N is labelled, W, NW and NE are all
            # 8-adjacent to N and were merged with it earlier in the scan, so
            # every labelled neighbour is already in N's class. Otherwise W
            # and NW are vertically adjacent, hence equivalent, and only NE
            # can bring in a new equivalence.
            if ln != 0:
                lab = ln
            else:
                lne = prev[x + 1] if (y > 0 and x + 1 < w) else 0
                lnw = prev[x - 1] if (y > 0 and x > 0) else 0
                if lw != 0:
                    lab = lw
                    if lne != 0:
                        lab = min(lw, lne)
                        uf_union(parent, size, lw, lne)
                elif lnw != 0:
                    lab = lnw
                    if lne != 0:
                        lab = min(lnw, lne)
                        uf_union(parent, size, lnw, lne)
                elif lne != 0:
                    lab = lne
                else:
                    lab = next_label
                    parent[lab] = lab
                    size[lab] = 1
                    next_label += 1
            cur[x] = lab
            lw = lab
    return next_label - 1


@numba.njit(cache=True, nogil=True)
def _dense_lookup(parent, n_provisional):
    """Final label of every provisional label.

    A component's first pixel in scan order has no labelled neighbour and
    so opens a fresh provisional label, the smallest in its class. Walking
    provisional labels upward therefore meets the roots in first-encounter
    scan order.
    """
    lut = np.zeros(n_provisional + 1, dtype=np.int32)
    k = 0
    for lab in range(1, n_provisional + 1):
        r = uf_find(parent, lab)
        if lut[r] == 0:
            k += 1
            lut[r] = k
        lut[lab] = lut[r]
    return lut, k


@numba.njit(cache=True, nogil=True)
def _second_pass(labels, parent, n_provisional):
    h, w = labels.shape
    lut, k = _dense_lookup(parent, n_provisional)
    cap = k + 1
    area = np.zeros(cap, dtype=np.int64)
    minx = np.full(cap, w, dtype=np.int32)
    miny = np.full(cap, -1, dtype=np.int32)
    maxx = np.full(cap, -1, dtype=np.int32)
    maxy = np.full(cap, -1, dtype=np.int32)
    sumx = np.zeros(cap, dtype=np.int64)
    sumy = np.zeros(cap, dtype=np.int64)
    for y in range(h):
        cur = labels[y]
        run = 0
        x0 = 0
        # x == w is a sentinel step that closes the last stretch of the row
        for x in range(w + 1):
            d = lut[cur[x]] if x < w else 0
            if x < w:
                cur[x] = d
            if d != run:
                # a horizontal stretch of one label ended: fold it in at once
                if run != 0:
                    n = x - x0
                    area[run] += n
                    sumx[run] += (x0 + x - 1) * n // 2
                    sumy[run] += y * n
                    if x0 < minx[run]:
                        minx[run] = x0
                    if x - 1 > maxx[run]:
                        maxx[run] = x - 1
                    if miny[run] < 0:
                        miny[run] = y
                    maxy[run] = y
                run = d
                x0 = x
    return k, area, minx, miny, maxx, maxy, sumx, sumy


@dataclass(frozen=True, eq=False)
class _StatsArrays:
    """Column-oriented stats indexed by label (row 0 unused)."""

    n: int
    area: np.ndarray
    minx: np.ndarray
    miny: np.ndarray
    maxx: np.ndarray
    maxy: np.ndarray
    sumx: np.ndarray
    sumy: np.ndarray
    width: int
    height: int

    def touches_border(self) -> np.ndarray:
        return ((self.minx == 0) | (self.miny == 0)
                | (self.maxx == self.width - 1) | (self.maxy == self.height - 1))

    def record(self, lab: int) -> ComponentStats:
        a = int(self.area[lab])
        x0, y0 = int(self.minx[lab]), int(self.miny[lab])
        return ComponentStats(
            label=lab,
            area=a,
            bbox=(x0, y0, int(self.maxx[lab]) - x0 + 1, int(self.maxy[lab]) - y0 + 1),
            centroid=(float(self.sumx[lab]) / a, float(self.sumy[lab]) / a),
            touches_border=bool(self.touches_border()[lab]),
        )

    def records(self) -> list[ComponentStats]:
        border = self.touches_border()
        out = []
        for lab in range(1, self.n + 1):
            a = int(self.area[lab])
            x0, y0 = int(self.minx[lab]), int(self.miny[lab])
            out.append(ComponentStats(
                label=lab,
                area=a,
                bbox=(x0, y0, int(self.maxx[lab]) - x0 + 1, int(self.maxy[lab]) - y0 + 1),
                centroid=(float(self.sumx[lab]) / a, float(self.sumy[lab]) / a),
                touches_border=bool(border[lab]),
            ))
        return out


def label_components(img: np.ndarray, connectivity=Connectivity.EIGHT):
    """Label ``img`` and return ``(labels, stats_arrays)``.

    Lower-level twin of :func:`ccl_two_pass` that keeps statistics as
    arrays; the detector uses it to avoid building one object per
    component.
    """
    conn = Connectivity.coerce(connectivity)
    img = check_binary_image(img)
    h, w = img.shape
    labels = np.empty((h, w), dtype=np.int32)
    # Upper bound on provisional labels; np.empty leaves untouched pages unmapped.
    cap = (h * w) // 2 + 2
    parent = np.empty(cap, dtype=np.int32)
    size = np.empty(cap, dtype=np.int32)
    n_prov = _first_pass(img, labels, parent, size, conn == Connectivity.EIGHT)
    k, *cols = _second_pass(labels, parent, n_prov)
    return labels, _StatsArrays(k, *cols, width=w, height=h)


def ccl_two_pass(img, connectivity=Connectivity.EIGHT) -> tuple[np.ndarray, list[ComponentStats]]:
    """Label the foreground (value 1) components of a binary image.

    Returns the label map (``int32``, 0 for background, components numbered
    ``1..K`` in raster order of their first pixel) and one
    :class:`ComponentStats` per component, ordered by label.
    """
    labels, stats = label_components(img, connectivity)
    return labels, stats.records()


@numba.njit(cache=True, nogil=True)
def _stats_from_labels(labels, k):
    h, w = labels.shape
    area = np.zeros(k + 1, dtype=np.int64)
    minx = np.full(k + 1, w, dtype=np.int32)
    miny = np.full(k + 1, h, dtype=np.int32)
    maxx = np.full(k + 1, -1, dtype=np.int32)
    maxy = np.full(k + 1, -1, dtype=np.int32)
    sumx = np.zeros(k + 1, dtype=np.int64)
    sumy = np.zeros(k + 1, dtype=np.int64)
    for y in range(h):
        for x in range(w):
            lab = labels[y, x]
            if lab == 0:
                continue
            area[lab] += 1
            sumx[lab] += x
            sumy[lab] += y
            minx[lab] = min(minx[lab], x)
            maxx[lab] = max(maxx[lab], x)
            miny[lab] = min(miny[lab], y)
            maxy[lab] = max(maxy[lab], y)
    return area, minx, miny, maxx, maxy, sumx, sumy


def component_stats(labelmap) -> list[ComponentStats]:
    """Statistics for a dense label map, one entry per label in order."""
    labels = np.ascontiguousarray(labelmap, dtype=np.int32)
    if labels.ndim != 2:
        raise ValueError("labelmap must be 2-D")
    k = int(labels.max(initial=0))
    h, w = labels.shape
    cols = _stats_from_labels(labels, k)
    stats = _StatsArrays(k, *cols, width=w, height=h)
    if k and np.any(stats.area[1:] == 0):
        raise ValueError("labelmap labels are not dense 1..K")
    return stats.records()
