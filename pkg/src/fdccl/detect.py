"""Coverage-hole detection on rendered layouts.

A hole is a connected region of empty space that does not touch the image
border and whose area reaches ``t = alpha * W * H`` pixels. Two detectors
find them: component labeling of the inverted image (:func:`detect_holes_ccl`)
and border following (:func:`detect_holes_ct`, the contour-tracing
baseline). Both report holes with the same field semantics.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field, replace

import numba
import numpy as np
from scipy.spatial import cKDTree

from .ccl import Connectivity, label_components
from .contour import _trace_raw
from .raster import RasterParams, pixel_positions, render_binary
from .validation import check_binary_image

__all__ = [
    "Method",
    "DetectParams",
    "Hole",
    "DetectionReport",
    "detect_holes",
    "detect_holes_ccl",
    "detect_holes_ct",
    "map_nodes_to_holes",
    "run_pipeline",
    "overlay",
]


class Method(str, enum.Enum):
    CCL = "ccl"
    CT = "ct"

    @classmethod
    def coerce(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown method {value!r}; expected 'ccl' or 'ct'") from None


@dataclass(frozen=True)
class DetectParams:
    method: Method = Method.CCL
    area_threshold_fraction: float = 0.001
    connectivity: Connectivity = Connectivity.EIGHT
    node_adjacency_px: int = 2

    def __post_init__(self):
        object.__setattr__(self, "method", Method.coerce(self.method))
        object.__setattr__(self, "connectivity", Connectivity.coerce(self.connectivity))
        if not 0 < self.area_threshold_fraction < 1:
            raise ValueError("area_threshold_fraction must lie in (0, 1)")
        if int(self.node_adjacency_px) < 1:
            raise ValueError("node_adjacency_px must be a positive integer")

    def threshold_px(self, width: int, height: int) -> float:
        return self.area_threshold_fraction * width * height

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "area_threshold_fraction": self.area_threshold_fraction,
            "connectivity": self.connectivity.name.lower(),
            "node_adjacency_px": self.node_adjacency_px,
        }


@dataclass(frozen=True, eq=False)
class Hole:
    id: int
    area_px: float
    bbox: tuple[int, int, int, int]
    centroid: tuple[float, float]
    boundary_pixels: np.ndarray = field(repr=False)
    node_ids: frozenset = frozenset()

    def to_dict(self) -> dict:
        area = int(self.area_px) if float(self.area_px).is_integer() else float(self.area_px)
        return {
            "id": self.id,
            "area_px": area,
            "bbox": list(self.bbox),
            "centroid": [float(c) for c in self.centroid],
            "node_ids": sorted(int(i) for i in self.node_ids),
        }


@dataclass(eq=False)
class DetectionReport:
    holes: list[Hole]
    method: Method
    params: DetectParams
    width: int
    height: int
    threshold_px: float
    locate_time_ns: int
    canvas: tuple[float, float] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_holes(self) -> int:
        return len(self.holes)

    @property
    def locate_time(self) -> float:
        """Seconds spent in detection and property extraction."""
        return self.locate_time_ns / 1e9

    def detected_nodes(self) -> set[int]:
        out: set[int] = set()
        for h in self.holes:
            out.update(int(i) for i in h.node_ids)
        return out

    def to_dict(self) -> dict:
        canvas = list(self.canvas) if self.canvas is not None else [self.width, self.height]
        return {
            "method": self.method.value,
            "canvas": canvas,
            "image": [self.width, self.height],
            "threshold_px": self.threshold_px,
            "locate_time_ns": self.locate_time_ns,
            "params": self.params.to_dict(),
            "holes": [h.to_dict() for h in self.holes],
            **({"meta": self.meta} if self.meta else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ------------------------------------------------------------------ CCL path

@numba.njit(cache=True, nogil=True)
def _component_boundary(labels, lab, x0, y0, x1, y1):
    """Pixels of component ``lab`` with a 4-neighbour outside it."""
    h, w = labels.shape
    n = 0
    out = np.empty((2 * ((x1 - x0 + 1) + (y1 - y0 + 1)) + 16, 2), dtype=np.int64)
    for y in range(y0, y1 + 1):
        for x in range(x0, x1 + 1):
            if labels[y, x] != lab:
                continue
            edge = (x == 0 or y == 0 or x == w - 1 or y == h - 1
                    or labels[y, x - 1] != lab or labels[y, x + 1] != lab
                    or labels[y - 1, x] != lab or labels[y + 1, x] != lab)
            if edge:
                if n >= out.shape[0]:
                    bigger = np.empty((2 * out.shape[0], 2), dtype=np.int64)
                    bigger[:n] = out[:n]
                    out = bigger
                out[n, 0] = x
                out[n, 1] = y
                n += 1
    return out[:n]


def _locate_ccl(ink: np.ndarray, p: DetectParams):
    h, w = ink.shape
    t = p.threshold_px(w, h)
    labels, st = label_components(1 - ink, p.connectivity)
    keep = np.flatnonzero(~st.touches_border()[1:] & (st.area[1:] >= t)) + 1
    # area descending, label (= scan order) ascending on ties
    keep = keep[np.lexsort((keep, -st.area[keep]))]
    return labels, [st.record(int(lab)) for lab in keep], t


def detect_holes_ccl(img, p: DetectParams = DetectParams()) -> DetectionReport:
    """Holes as non-border components of the inverted image (ink = 1 in ``img``).

    ``locate_time`` covers inversion, labeling, filtering and the area, bbox
    and centroid of every hole. Boundary pixels are gathered afterwards
    from the label map, outside the timed region, as they are for the
    contour detector.
    """
    ink = check_binary_image(img)
    t0 = time.perf_counter_ns()
    labels, recs, t = _locate_ccl(ink, p)
    elapsed = time.perf_counter_ns() - t0
    holes = []
    for hid, rec in enumerate(recs, start=1):
        x, y, bw, bh = rec.bbox
        boundary = _component_boundary(labels, rec.label, x, y, x + bw - 1, y + bh - 1)
        holes.append(Hole(hid, rec.area, rec.bbox, rec.centroid, boundary))
    h, w = ink.shape
    return DetectionReport(holes, Method.CCL, replace(p, method=Method.CCL), w, h, t, elapsed)


# ------------------------------------------------------------------- CT path

@numba.njit(cache=True, nogil=True)
def _contour_table(xs, ys, offsets):
    nb = offsets.shape[0] - 1
    minx = np.empty(nb, dtype=np.int64)
    miny = np.empty(nb, dtype=np.int64)
    maxx = np.empty(nb, dtype=np.int64)
    maxy = np.empty(nb, dtype=np.int64)
    twice_area = np.empty(nb, dtype=np.int64)
    cx = np.empty(nb)
    cy = np.empty(nb)
    for b in range(nb):
        lo = offsets[b]
        hi = offsets[b + 1]
        x0 = xs[lo]
        x1 = xs[lo]
        y0 = ys[lo]
        y1 = ys[lo]
        s = 0
        sx = 0.0
        sy = 0.0
        for k in range(lo, hi):
            k1 = k + 1 if k + 1 < hi else lo
            xa = np.int64(xs[k])
            ya = np.int64(ys[k])
            xb = np.int64(xs[k1])
            yb = np.int64(ys[k1])
            cross = xa * yb - xb * ya
            s += cross
            sx += (xa + xb) * cross
            sy += (ya + yb) * cross
            if xa < x0:
                x0 = xa
            elif xa > x1:
                x1 = xa
            if ya < y0:
                y0 = ya
            elif ya > y1:
                y1 = ya
        minx[b] = x0
        maxx[b] = x1
        miny[b] = y0
        maxy[b] = y1
        twice_area[b] = abs(s)
        if s != 0:
            cx[b] = sx / (3.0 * s)
            cy[b] = sy / (3.0 * s)
        else:
            mx = 0.0
            my = 0.0
            for k in range(lo, hi):
                mx += xs[k]
                my += ys[k]
            cx[b] = mx / (hi - lo)
            cy[b] = my / (hi - lo)
    return minx, miny, maxx, maxy, twice_area, cx, cy


def _locate_ct(ink: np.ndarray, p: DetectParams):
    h, w = ink.shape
    t = p.threshold_px(w, h)
    xs, ys, offsets, outer, _parent = _trace_raw(1 - ink)
    minx, miny, maxx, maxy, twice_area, cx, cy = _contour_table(xs, ys, offsets)
    n_steps = np.diff(offsets)
    n_steps[n_steps < 2] = 0
    # Shoelace area of the boundary walk converted to a pixel count (Pick).
    pix_area = twice_area / 2.0 + n_steps / 2.0 + 1.0
    border = (minx == 0) | (miny == 0) | (maxx == w - 1) | (maxy == h - 1)
    keep = np.flatnonzero(outer & ~border & (pix_area >= t))
    keep = keep[np.lexsort((keep, -pix_area[keep]))]
    props = [(float(pix_area[b]),
              (int(minx[b]), int(miny[b]), int(maxx[b] - minx[b] + 1), int(maxy[b] - miny[b] + 1)),
              (float(cx[b]), float(cy[b])))
             for b in keep]
    return (xs, ys, offsets), keep, props, t


def detect_holes_ct(img, p: DetectParams = DetectParams()) -> DetectionReport:
    """Holes as outer borders of empty-space regions, found by border following.

    The shoelace area of a traced border undercounts the enclosed pixels by
    half the border length plus one; the area filter compares the
    corrected, pixel-equivalent area against the same threshold the CCL
    detector uses. The timed region matches :func:`detect_holes_ccl`.
    """
    ink = check_binary_image(img)
    t0 = time.perf_counter_ns()
    (xs, ys, offsets), keep, props, t = _locate_ct(ink, p)
    elapsed = time.perf_counter_ns() - t0
    holes = []
    for hid, (b, (area, bbox, centroid)) in enumerate(zip(keep, props), start=1):
        lo, hi = offsets[b], offsets[b + 1]
        pts = np.unique(np.stack([xs[lo:hi], ys[lo:hi]], axis=1).astype(np.int64), axis=0)
        holes.append(Hole(hid, area, bbox, centroid, pts))
    h, w = ink.shape
    return DetectionReport(holes, Method.CT, replace(p, method=Method.CT), w, h, t, elapsed)


def detect_holes(img, p: DetectParams = DetectParams()) -> DetectionReport:
    if p.method is Method.CCL:
        return detect_holes_ccl(img, p)
    return detect_holes_ct(img, p)


# --------------------------------------------------------------- node mapping

def map_nodes_to_holes(layout, holes: list[Hole], adjacency_px: int = 2,
                       raster_params: RasterParams = RasterParams()) -> list[Hole]:
    """Attach to each hole the nodes drawn next to its boundary.

    Node ``i`` belongs to hole ``h`` when the Chebyshev distance from its
    pixel to the nearest boundary pixel of ``h`` is at most
    ``adjacency_px + node_radius_px``. A node may touch several holes.
    """
    if not holes:
        return []
    pix = pixel_positions(layout.positions, raster_params.margin)
    radius = adjacency_px + raster_params.node_radius_px
    boundary = np.concatenate([h.boundary_pixels for h in holes])
    owner = np.concatenate([np.full(len(h.boundary_pixels), k) for k, h in enumerate(holes)])
    tree = cKDTree(boundary)
    members: list[set[int]] = [set() for _ in holes]
    hits = tree.query_ball_point(pix, r=radius + 1e-9, p=np.inf)
    for node, idx in enumerate(hits):
        for k in set(owner[idx].tolist()):
            members[k].add(node)
    return [replace(h, node_ids=frozenset(m)) for h, m in zip(holes, members)]


# -------------------------------------------------------------------- pipeline

def run_pipeline(topology, layout_run, raster_params: RasterParams = RasterParams(),
                 detect_params: DetectParams = DetectParams(), *, layout=None) -> DetectionReport:
    """Layout -> rasterize -> threshold -> detect -> map nodes.

    Pass ``layout`` to skip the force-directed stage (for instance to run
    the detector on true node coordinates already fitted to a canvas).
    """
    from .layout import run_layout

    if layout is None:
        layout = run_layout(topology, layout_run)
    ink = render_binary(layout, topology, raster_params)
    report = detect_holes(ink, detect_params)
    report.holes = map_nodes_to_holes(layout, report.holes, detect_params.node_adjacency_px,
                                      raster_params)
    report.canvas = (layout.canvas_width, layout.canvas_height)
    report.meta = {"layout": dict(layout.meta), "raster": {
        "threshold": raster_params.threshold,
        "node_radius_px": raster_params.node_radius_px,
        "line_thickness_px": raster_params.line_thickness_px,
        "supersample": raster_params.supersample,
    }}
    return report


def overlay(ink, report: DetectionReport) -> np.ndarray:
    """RGB picture of the drawing with detected hole regions filled blue."""
    ink = check_binary_image(ink)
    rgb = np.where(ink[..., None] == 1, 0, 255).astype(np.uint8).repeat(3, axis=2)
    labels, _ = label_components(1 - ink, report.params.connectivity)
    for h in report.holes:
        if len(h.boundary_pixels) == 0:
            continue
        x, y = h.boundary_pixels[0]
        region = labels == labels[y, x]
        rgb[region] = (64, 96, 255)
    return rgb
