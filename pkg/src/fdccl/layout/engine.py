"""Iteration driver for force-directed layouts and canvas fitting."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from ..errors import DegenerateLayoutError, DivergenceError
from ..validation import check_positions
from . import forces
from .params import Algorithm, LayoutRun, canvas_side

__all__ = ["Layout", "run_layout", "iterate_layout", "fit_to_canvas", "write_layout", "read_layout"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Layout:
    positions: np.ndarray = field(repr=False)
    canvas_width: float
    canvas_height: float
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        pos = check_positions(self.positions)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        if not (self.canvas_width > 0 and self.canvas_height > 0):
            raise ValueError("canvas dimensions must be positive")

    @property
    def node_count(self) -> int:
        return len(self.positions)

    def __eq__(self, other):
        if not isinstance(other, Layout):
            return NotImplemented
        return (np.array_equal(self.positions, other.positions)
                and self.canvas_width == other.canvas_width
                and self.canvas_height == other.canvas_height)


def fit_to_canvas(layout, n_nodes: int | None = None) -> Layout:
    """Translate to the origin and scale uniformly into the target canvas.

    The canvas is 600 x 600 up to 150 nodes and ``4n x 4n`` beyond. A
    single scale factor ``min(W / extent_x, H / extent_y)`` preserves the
    aspect ratio. ``layout`` may be a :class:`Layout` or a raw (n, 2) array.
    """
    raw = layout.positions if isinstance(layout, Layout) else layout
    pos = check_positions(raw)
    if len(pos) == 0:
        raise ValueError("layout has no nodes")
    n = len(pos) if n_nodes is None else int(n_nodes)
    side = canvas_side(n)
    meta = dict(layout.meta) if isinstance(layout, Layout) else {}
    lo = pos.min(axis=0)
    extent = pos.max(axis=0) - lo
    shifted = pos - lo
    if len(pos) == 1:
        return Layout(shifted, side, side, meta)
    if extent[0] <= 0 and extent[1] <= 0:
        raise DegenerateLayoutError("all nodes coincide; layout has zero extent")
    scales = [side / e for e in extent if e > 0]
    scale = min(scales)
    fitted = shifted * scale
    # guard against round-off pushing a coordinate past the edge
    np.clip(fitted, 0.0, side, out=fitted)
    return Layout(fitted, side, side, meta)


def _initial_positions(n: int, S: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, S, size=(n, 2))


def iterate_layout(topology, run: LayoutRun, initial_positions=None) -> Iterator[tuple[int, np.ndarray, float]]:
    """Yield ``(iteration, positions, stability)`` after every step.

    ``run`` must already be resolved (see :meth:`LayoutRun.resolved`).
    Positions are in simulation units, before canvas fitting. ``stability``
    is the mean per-node displacement of the step divided by the canvas
    size. Iteration stops once it drops below ``run.stability_epsilon`` or
    the budget is exhausted.
    """
    if run.params is None or run.canvas_size is None:
        raise ValueError("LayoutRun must be resolved before iterating")
    n = topology.node_count
    S = float(run.canvas_size)
    p = run.params
    seed = run.seed
    if initial_positions is None:
        pos = _initial_positions(n, S, seed)
    else:
        pos = check_positions(initial_positions, n).copy()

    algo = run.algorithm
    if algo is Algorithm.KK:
        hops = forces.graph_distances(topology)
        if not np.all(np.isfinite(hops)):
            raise ValueError("KK layout needs a connected topology")
        step = lambda x, it: forces.kk_step(x, topology, p, hops, seed)  # noqa: E731
    elif algo is Algorithm.FA2:
        center = (S / 2.0, S / 2.0)
        step = lambda x, it: forces.fa2_step(x, topology, p, center, seed)  # noqa: E731
    elif algo is Algorithm.FR:
        step = lambda x, it: forces.fr_step(x, topology, p, it, seed)  # noqa: E731
    else:
        step = lambda x, it: forces.jiggle_step(x, topology, p, seed)  # noqa: E731

    for it in range(run.max_iterations):
        new = step(pos, it)
        finite = np.isfinite(new).all(axis=1)
        if not finite.all():
            raise DivergenceError(it, int(np.flatnonzero(~finite)[0]))
        stability = float(np.mean(np.hypot(*(new - pos).T))) / S
        pos = new
        yield it, pos, stability
        if stability < run.stability_epsilon:
            return


def run_layout(topology, run: LayoutRun, initial_positions=None) -> Layout:
    """Iterate ``run.algorithm`` on ``topology`` and fit the result to the canvas."""
    if not topology.is_connected():
        raise ValueError("topology must be connected")
    resolved = run.resolved(topology.node_count, int(topology.degrees().max(initial=0)))
    pos = None
    iterations = 0
    stability = float("nan")
    for it, pos, stability in iterate_layout(topology, resolved, initial_positions):
        iterations = it + 1
    if pos is None:  # pragma: no cover - max_iterations >= 1
        raise RuntimeError("no iterations were run")
    logger.debug("%s layout: %d iterations, final stability %.3g",
                 resolved.algorithm.value, iterations, stability)
    meta = resolved.to_dict()
    meta["iterations_run"] = iterations
    meta["final_stability"] = stability
    return fit_to_canvas(Layout(pos, resolved.canvas_size, resolved.canvas_size, meta),
                         topology.node_count)


# ------------------------------------------------------------------------ I/O

def write_layout(layout: Layout, csv_path, json_path=None) -> None:
    """``id,x,y`` CSV plus an optional JSON sidecar of run metadata."""
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "x", "y"])
        for i, (x, y) in enumerate(layout.positions):
            writer.writerow([i, repr(float(x)), repr(float(y))])
    if json_path is not None:
        meta = layout.meta
        sidecar = {
            "algorithm": meta.get("algorithm"),
            "iterations_run": meta.get("iterations_run"),
            "canvas": [layout.canvas_width, layout.canvas_height],
            "seed": meta.get("seed"),
            "params": meta.get("params"),
            "run": {k: v for k, v in meta.items() if k not in ("algorithm", "iterations_run", "seed", "params")},
        }
        Path(json_path).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def read_layout(csv_path, json_path=None) -> Layout:
    from ..topology import read_positions_csv

    pos = read_positions_csv(csv_path)
    if json_path is not None and Path(json_path).exists():
        sidecar = json.loads(Path(json_path).read_text(encoding="utf-8"))
        w, h = sidecar["canvas"]
        meta = {k: v for k, v in sidecar.items() if k not in ("canvas", "run")}
        meta.update(sidecar.get("run") or {})
        return Layout(pos, float(w), float(h), meta)
    side = canvas_side(len(pos))
    return Layout(pos, side, side)
