"""Node-level scoring of detected holes, experiment matrix and timing benchmark.

Ground truth comes from running the detector on the true node positions
(fitted to the same canvas as the force-directed drawing). Nodes found on
ground-truth hole contours form the reference set; nodes found on holes
of the force-directed drawing form the detected set.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .detect import DetectParams, Method, detect_holes, map_nodes_to_holes, run_pipeline
from .layout import Algorithm, Layout, LayoutRun, fit_to_canvas, run_layout
from .raster import RasterParams, render_binary
from .topology import GenSpec, generate_topology

__all__ = [
    "Confusion",
    "EvalReport",
    "BenchReport",
    "ground_truth_layout",
    "ground_truth_labels",
    "confusion",
    "sensitivity",
    "specificity",
    "evaluate",
    "run_experiment_matrix",
    "write_matrix_csv",
    "write_reports_json",
    "bench_locate",
    "bench_corpus",
    "write_bench_csv",
    "LAYOUT_CLASSES",
    "SENSITIVITY_KEY",
]

logger = logging.getLogger(__name__)

# Sensitivity is TP / (TP + FP) as the method defines it, which is what is
# usually called precision; the report key says so.
SENSITIVITY_KEY = "hole_sensitivity_paper_eq24"

# layout class -> (carved hole count, hole radius as a fraction of the region)
LAYOUT_CLASSES = {
    "sparse": (2, 0.12),
    "uniform": (0, 0.12),
}


@dataclass(frozen=True)
class Confusion:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(gt_set, detected_set, node_count: int) -> Confusion:
    gt = set(int(i) for i in gt_set)
    det = set(int(i) for i in detected_set)
    for s in (gt, det):
        if s and (min(s) < 0 or max(s) >= node_count):
            raise ValueError(f"node ids must lie in [0, {node_count})")
    return Confusion(tp=len(gt & det), tn=node_count - len(gt | det),
                     fp=len(det - gt), fn=len(gt - det))


def sensitivity(c: Confusion) -> float | None:
    """``tp / (tp + fp)``; None when no node was detected."""
    den = c.tp + c.fp
    return None if den == 0 else c.tp / den


def specificity(c: Confusion) -> float | None:
    """``tn / (tn + fn)``; None when every node is a detection."""
    den = c.tn + c.fn
    return None if den == 0 else c.tn / den


def _exact_ratio(num: int, den: int) -> Fraction | None:
    return None if den == 0 else Fraction(num, den)


@dataclass
class EvalReport:
    confusion: Confusion | None
    meta: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def sensitivity(self) -> float | None:
        return None if self.confusion is None else sensitivity(self.confusion)

    @property
    def specificity(self) -> float | None:
        return None if self.confusion is None else specificity(self.confusion)

    def check(self) -> bool:
        """Stored metrics equal the exact ratios of the stored counts."""
        if self.confusion is None:
            return True
        c = self.confusion
        for got, want in ((self.sensitivity, _exact_ratio(c.tp, c.tp + c.fp)),
                          (self.specificity, _exact_ratio(c.tn, c.tn + c.fn))):
            if (got is None) != (want is None):
                return False
            if want is not None and Fraction(got) != Fraction(float(want)):
                return False
        return c.total == self.meta.get("node_count", c.total)

    def to_dict(self) -> dict:
        out = dict(self.meta)
        if self.confusion is not None:
            out["confusion"] = asdict(self.confusion)
        out[SENSITIVITY_KEY] = self.sensitivity
        out["hole_specificity"] = self.specificity
        if self.error is not None:
            out["error"] = self.error
        return out


# ---------------------------------------------------------------- ground truth

def ground_truth_layout(gt, n_nodes: int | None = None) -> Layout:
    """True node positions fitted to the canvas used for force-directed drawings."""
    return fit_to_canvas(gt.positions, n_nodes)


def ground_truth_labels(gt, topology, raster_params: RasterParams = RasterParams(),
                        detect_params: DetectParams = DetectParams()) -> set[int]:
    """Nodes on hole contours when the graph is drawn at its true positions.

    The drawing, the detector (always CCL) and the node association rule
    are exactly those applied to force-directed layouts.
    """
    layout = ground_truth_layout(gt, topology.node_count)
    ink = render_binary(layout, topology, raster_params)
    report = detect_holes(ink, replace(detect_params, method=Method.CCL))
    holes = map_nodes_to_holes(layout, report.holes, detect_params.node_adjacency_px, raster_params)
    return set().union(*(h.node_ids for h in holes)) if holes else set()


def evaluate(topology, gt, layout_run: LayoutRun, raster_params: RasterParams = RasterParams(),
             detect_params: DetectParams = DetectParams(), *, layout: Layout | None = None,
             meta: dict | None = None) -> EvalReport:
    """Score one force-directed run (or a supplied ``layout``) against ground truth."""
    gt_set = ground_truth_labels(gt, topology, raster_params, detect_params)
    report = run_pipeline(topology, layout_run, raster_params, detect_params, layout=layout)
    c = confusion(gt_set, report.detected_nodes(), topology.node_count)
    info = dict(meta or {})
    info.update({
        "node_count": topology.node_count,
        "edge_count": topology.n_edges,
        "gt_contour_nodes": len(gt_set),
        "detected_holes": report.n_holes,
        "locate_time_ns": report.locate_time_ns,
        "layout": report.meta.get("layout", {}),
        "raster": report.meta.get("raster", {}),
        "detect": detect_params.to_dict(),
    })
    return EvalReport(c, info)


# ------------------------------------------------------------ experiment matrix

def dataset_seed(seed: int, n: int, d: float, layout_class: str) -> int:
    """Seed for one generated dataset, shared by every algorithm run on it."""
    key = [int(seed), int(n), int(round(float(d) * 1000)), sorted(LAYOUT_CLASSES).index(layout_class)]
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint64)[0])


def run_experiment_matrix(node_counts, degrees, algorithms, layout_classes, seeds, *,
                          raster_params: RasterParams = RasterParams(),
                          detect_params: DetectParams = DetectParams(),
                          max_iterations: int = 1000,
                          stability_epsilon: float = 1e-4,
                          use_ground_truth_layout: bool = False) -> list[EvalReport]:
    """Evaluate every cell of the cross product of the axes.

    One topology is generated per (seed, n, d, layout class) and reused for
    all algorithms. A failing cell is recorded with its error message and
    the matrix carries on. ``use_ground_truth_layout`` replaces the
    force-directed layout with the true positions (a sanity check: both
    sides of the comparison then coincide).
    """
    axes = [list(node_counts), list(degrees), list(algorithms), list(layout_classes), list(seeds)]
    if any(len(a) == 0 for a in axes):
        raise ValueError("every axis of the experiment matrix must be non-empty")
    algos = [Algorithm.coerce(a) for a in axes[2]]
    for lc in axes[3]:
        if lc not in LAYOUT_CLASSES:
            raise ValueError(f"unknown layout class {lc!r}; expected one of {sorted(LAYOUT_CLASSES)}")

    reports: list[EvalReport] = []
    for n, d, lc, seed in itertools.product(axes[0], axes[1], axes[3], axes[4]):
        holes, radius = LAYOUT_CLASSES[lc]
        ds = dataset_seed(seed, n, d, lc)
        base = {"n": int(n), "d": float(d), "layout_class": lc, "seed": int(seed), "dataset_seed": ds}
        try:
            topo, gt = generate_topology(GenSpec(int(n), float(d), holes, radius, seed=ds))
        except Exception as exc:  # noqa: BLE001 - recorded per cell
            logger.warning("generation failed for %s: %s", base, exc)
            for a in algos:
                reports.append(EvalReport(None, {**base, "algorithm": a.value}, f"{type(exc).__name__}: {exc}"))
            continue
        gt_layout = ground_truth_layout(gt, topo.node_count) if use_ground_truth_layout else None
        for a in algos:
            meta = {**base, "algorithm": a.value, "average_degree": 2.0 * topo.n_edges / topo.node_count}
            run = LayoutRun(a, max_iterations=max_iterations, stability_epsilon=stability_epsilon, seed=ds)
            try:
                reports.append(evaluate(topo, gt, run, raster_params, detect_params,
                                        layout=gt_layout, meta=meta))
            except Exception as exc:  # noqa: BLE001 - recorded per cell
                logger.warning("cell failed for %s: %s", meta, exc)
                reports.append(EvalReport(None, meta, f"{type(exc).__name__}: {exc}"))
    return reports


MATRIX_COLUMNS = ["n", "d", "algorithm", "layout_class", "seed", "tp", "tn", "fp", "fn",
                  "sensitivity", "specificity"]


def _fmt(v) -> str:
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def write_matrix_csv(reports: list[EvalReport], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MATRIX_COLUMNS)
        for r in reports:
            c = r.confusion
            counts = [c.tp, c.tn, c.fp, c.fn] if c is not None else ["", "", "", ""]
            w.writerow([r.meta.get("n"), _fmt(r.meta.get("d")), r.meta.get("algorithm"),
                        r.meta.get("layout_class"), r.meta.get("seed"), *counts,
                        _fmt(r.sensitivity), _fmt(r.specificity)])


def write_reports_json(reports: list[EvalReport], path, config: dict | None = None) -> None:
    doc = {"config": config or {}, "reports": [r.to_dict() for r in reports]}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ------------------------------------------------------------------- benchmark

@dataclass
class BenchReport:
    """Timing samples (ns) per (n, d, method) cell."""

    samples: dict[tuple[int, float, str], list[int]]
    repetitions: int
    warmup: int

    @staticmethod
    def _median_mad(xs) -> tuple[float, float]:
        a = np.asarray(xs, dtype=np.float64)
        med = float(np.median(a))
        return med, float(np.median(np.abs(a - med)))

    def summary(self) -> dict[tuple[int, float, str], tuple[float, float, int]]:
        """Cell -> (median_ns, mad_ns, sample count)."""
        return {k: (*self._median_mad(v), len(v)) for k, v in sorted(self.samples.items())}

    def speedup(self) -> dict[tuple[int, float], float]:
        """median(CT) / median(CCL) for every (n, d) group holding both methods."""
        out = {}
        summ = self.summary()
        for (n, d, m) in summ:
            if m != Method.CCL.value or (n, d, Method.CT.value) not in summ:
                continue
            out[(n, d)] = summ[(n, d, Method.CT.value)][0] / summ[(n, d, m)][0]
        return out

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "warmup": self.warmup,
            "cells": [{"n": n, "d": d, "method": m, "median_ns": med, "mad_ns": mad,
                       "samples": self.samples[(n, d, m)]}
                      for (n, d, m), (med, mad, _) in self.summary().items()],
            "speedup": [{"n": n, "d": d, "ct_over_ccl": s} for (n, d), s in sorted(self.speedup().items())],
        }


def bench_locate(images, methods=(Method.CCL, Method.CT), repetitions: int = 5, *, warmup: int = 2,
                 detect_params: DetectParams = DetectParams()) -> BenchReport:
    """Time detection on in-memory binary images.

    ``images`` is a sequence of ``(n, d, ink)`` triples. For each image
    every method runs ``warmup`` untimed passes, then ``repetitions`` timed
    passes interleaved across methods so slow drift affects all alike.
    """
    if repetitions < 5:
        raise ValueError("repetitions must be at least 5")
    ms = [Method.coerce(m) for m in methods]
    if not ms:
        raise ValueError("at least one method is required")
    samples: dict[tuple[int, float, str], list[int]] = {}
    params = {m: replace(detect_params, method=m) for m in ms}
    for n, d, ink in images:
        for m in ms:
            samples.setdefault((int(n), float(d), m.value), [])
            for _ in range(warmup):
                detect_holes(ink, params[m])
        for _ in range(repetitions):
            for m in ms:
                t = detect_holes(ink, params[m]).locate_time_ns
                samples[(int(n), float(d), m.value)].append(max(int(t), 1))
    return BenchReport(samples, repetitions, warmup)


def bench_corpus(n: int, degrees, algorithms, seeds, *, layout_class: str = "sparse",
                 raster_params: RasterParams = RasterParams(), max_iterations: int = 1000):
    """Yield ``(n, d, ink)`` for force-directed drawings of generated networks."""
    holes, radius = LAYOUT_CLASSES[layout_class]
    for d, seed in itertools.product(degrees, seeds):
        ds = dataset_seed(seed, n, d, layout_class)
        topo, _ = generate_topology(GenSpec(int(n), float(d), holes, radius, seed=ds))
        for a in algorithms:
            layout = run_layout(topo, LayoutRun(a, max_iterations=max_iterations, seed=ds))
            yield int(n), float(d), render_binary(layout, topo, raster_params)


def write_bench_csv(report: BenchReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "d", "method", "median_ns", "mad_ns", "samples"])
        for (n, d, m), (med, mad, k) in report.summary().items():
            w.writerow([n, _fmt(d), m, _fmt(med), _fmt(mad), k])
