"""Synthetic sensor-network topologies and edge-list I/O.

Topologies are unit-disk graphs over nodes scattered in the unit square,
with optional circular "holes" carved out of the deployment region so the
ground truth is known by construction.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist

from .errors import EdgeListParseError, EdgeListRangeError, GenerationError
from .validation import check_edges, check_positions, check_random_seed

__all__ = [
    "Topology",
    "GroundTruth",
    "GenSpec",
    "generate_topology",
    "read_edge_list",
    "write_edge_list",
    "average_degree",
    "write_ground_truth",
    "read_ground_truth",
]

DEGREE_TOLERANCE = 0.05
MAX_BISECTION_STEPS = 64
MAX_CARVED_FRACTION = 0.5


def _canonical_edges(edges: np.ndarray) -> np.ndarray:
    if len(edges) == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    if np.any(lo == hi):
        bad = int(lo[lo == hi][0])
        raise ValueError(f"self-loop on node {bad}")
    return np.unique(np.stack([lo, hi], axis=1), axis=0)


@dataclass(frozen=True, eq=False)
class Topology:
    """Undirected simple graph on nodes ``0..node_count-1``.

    ``edges`` is canonicalised on construction: each pair is stored as
    ``(min, max)``, duplicates are collapsed and rows are sorted.
    """

    node_count: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.node_count) < 1:
            raise ValueError("node_count must be positive")
        object.__setattr__(self, "node_count", int(self.node_count))
        edges = check_edges(self.edges, self.node_count)
        edges = _canonical_edges(edges)
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return self.node_count == other.node_count and np.array_equal(self.edges, other.edges)

    def __repr__(self):
        return f"Topology(node_count={self.node_count}, n_edges={self.n_edges})"

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.node_count).astype(np.int64)

    def adjacency(self):
        """Symmetric CSR adjacency matrix with unit weights."""
        n = self.node_count
        u, v = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(u), dtype=np.int8)
        return coo_matrix((data, (np.r_[u, v], np.r_[v, u])), shape=(n, n)).tocsr()

    def is_connected(self) -> bool:
        if self.node_count == 1:
            return True
        n_comp, _ = connected_components(self.adjacency(), directed=False)
        return n_comp == 1


def average_degree(t: Topology) -> float:
    """Mean node degree, ``2 |E| / |V|``."""
    return 2.0 * t.n_edges / t.node_count


@dataclass(frozen=True)
class GenSpec:
    n: int
    target_degree: float
    hole_count: int = 0
    hole_radius_fraction: float = 0.12
    seed: int = 0

    def __post_init__(self):
        if int(self.n) < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not self.target_degree >= 1:
            raise ValueError(f"target_degree must be >= 1, got {self.target_degree}")
        if int(self.hole_count) < 0:
            raise ValueError("hole_count must be non-negative")
        if not 0 < self.hole_radius_fraction < 0.5:
            raise ValueError("hole_radius_fraction must lie in (0, 0.5)")
        object.__setattr__(self, "seed", check_random_seed(self.seed))


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """True node coordinates of a generated deployment.

    ``region`` is ``(xmin, ymin, xmax, ymax)``; ``carved_holes`` holds
    ``(cx, cy, r)`` triples.
    """

    positions: np.ndarray = field(repr=False)
    region: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)
    carved_holes: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        pos = check_positions(self.positions)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "carved_holes",
                           tuple(tuple(float(c) for c in h) for h in self.carved_holes))

    def __eq__(self, other):
        if not isinstance(other, GroundTruth):
            return NotImplemented
        return (np.array_equal(self.positions, other.positions)
                and tuple(self.region) == tuple(other.region)
                and self.carved_holes == other.carved_holes)

    @property
    def node_count(self) -> int:
        return len(self.positions)


def _carve_holes(rng: np.random.Generator, count: int, r: float) -> list[tuple[float, float, float]]:
    if count * math.pi * r * r > MAX_CARVED_FRACTION:
        raise GenerationError(
            f"{count} holes of radius {r} would exclude more than "
            f"{MAX_CARVED_FRACTION:.0%} of the deployment region")
    holes: list[tuple[float, float, float]] = []
    attempts = 0
    while len(holes) < count:
        attempts += 1
        if attempts > 10_000:
            raise GenerationError(f"could not place {count} non-overlapping holes of radius {r}")
        cx, cy = rng.uniform(r, 1.0 - r, size=2)
        if all(math.hypot(cx - hx, cy - hy) >= r + hr for hx, hy, hr in holes):
            holes.append((float(cx), float(cy), r))
    return holes


def _sample_positions(rng: np.random.Generator, n: int, holes) -> np.ndarray:
    out = np.empty((0, 2))
    while len(out) < n:
        batch = rng.uniform(0.0, 1.0, size=(2 * (n - len(out)) + 16, 2))
        keep = np.ones(len(batch), dtype=bool)
        for cx, cy, r in holes:
            keep &= np.hypot(batch[:, 0] - cx, batch[:, 1] - cy) >= r
        out = np.concatenate([out, batch[keep]])
    return out[:n]


def _pair_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Row/column of each entry of a condensed distance vector.
    return np.triu_indices(n, k=1)


def _largest_component(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Node ids (ascending) of the largest connected component."""
    graph = coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(n, n))
    _, comp = connected_components(graph, directed=False)
    sizes = np.bincount(comp)
    # ties go to the component holding the smallest node id
    best = comp[np.flatnonzero(sizes[comp] == sizes.max())[0]]
    return np.flatnonzero(comp == best)


def _restrict(n: int, u: np.ndarray, v: np.ndarray):
    nodes = _largest_component(n, u, v)
    remap = np.full(n, -1, dtype=np.int64)
    remap[nodes] = np.arange(len(nodes))
    keep = (remap[u] >= 0) & (remap[v] >= 0)
    edges = np.stack([remap[u[keep]], remap[v[keep]]], axis=1)
    return nodes, edges


def generate_topology(spec: GenSpec) -> tuple[Topology, GroundTruth]:
    """Generate a connected unit-disk graph matching ``spec``.

    The communication radius is found by bisection so that the average
    degree of the largest connected component lands within 5% of
    ``spec.target_degree``. Only that component is returned, with node ids
    renumbered densely in ascending order of their original ids.
    """
    rng = np.random.default_rng(spec.seed)
    holes = _carve_holes(rng, spec.hole_count, spec.hole_radius_fraction)
    pos = _sample_positions(rng, spec.n, holes)

    dist = pdist(pos)
    order = np.argsort(dist, kind="stable")
    sorted_dist = dist[order]
    rows, cols = _pair_index(spec.n)

    def realize(rho: float):
        m = int(np.searchsorted(sorted_dist, rho, side="right"))
        idx = order[:m]
        nodes, edges = _restrict(spec.n, rows[idx], cols[idx])
        return nodes, edges, 2.0 * len(edges) / len(nodes)

    lo, hi = 0.0, math.sqrt(2.0)
    target = spec.target_degree
    for _ in range(MAX_BISECTION_STEPS):
        rho = 0.5 * (lo + hi)
        nodes, edges, deg = realize(rho)
        if abs(deg - target) <= DEGREE_TOLERANCE * target:
            break
        if deg < target:
            lo = rho
        else:
            hi = rho
    else:
        raise GenerationError(
            f"average degree {target} unreachable for n={spec.n} "
            f"(last radius {rho:.6g} gave {deg:.4g})")

    topo = Topology(len(nodes), edges)
    gt = GroundTruth(pos[nodes], (0.0, 0.0, 1.0, 1.0), tuple(holes))
    return topo, gt


# ---------------------------------------------------------------- edge lists

def write_edge_list(t: Topology, path) -> None:
    lines = [f"# nodes={t.node_count}\n"]
    lines.extend(f"{u} {v}\n" for u, v in t.edges)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)


def read_edge_list(path) -> Topology:
    """Parse an edge-list file.

    The first line must be ``# nodes=N``; every later non-empty line holds
    two 0-based ids separated by a single space. Duplicate edges, in either
    orientation, are collapsed.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    header = lines[0].strip() if lines else ""
    if not header.startswith("# nodes="):
        raise EdgeListParseError(1, f"expected '# nodes=N' header, got {header!r}")
    try:
        n = int(header[len("# nodes="):])
    except ValueError:
        raise EdgeListParseError(1, f"bad node count in header {header!r}") from None
    if n < 1:
        raise EdgeListParseError(1, "node count must be positive")

    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        parts = line.split(" ")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise EdgeListParseError(lineno, f"expected 'u v', got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u >= n or v >= n:
            raise EdgeListRangeError(lineno, f"node id {max(u, v)} >= declared node count {n}")
        if u == v:
            raise EdgeListParseError(lineno, f"self-loop on node {u}")
        pairs.append((u, v))
    return Topology(n, np.array(pairs, dtype=np.int64).reshape(-1, 2))


# -------------------------------------------------------------- ground truth

def write_ground_truth(gt: GroundTruth, csv_path, holes_path, meta: dict | None = None) -> None:
    """Positions CSV plus the carved-hole JSON; ``meta`` is stored under ``"config"``."""
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "x", "y"])
        for i, (x, y) in enumerate(gt.positions):
            writer.writerow([i, repr(float(x)), repr(float(y))])
    payload = {
        "region": list(gt.region),
        "holes": [{"cx": cx, "cy": cy, "r": r} for cx, cy, r in gt.carved_holes],
    }
    if meta is not None:
        payload["config"] = meta
    with open(holes_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_positions_csv(path) -> np.ndarray:
    """Read an ``id,x,y`` CSV into an (n, 2) array ordered by id."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["id", "x", "y"]:
            raise ValueError(f"{os.fspath(path)}: expected header id,x,y, got {header}")
        rows = [(int(i), float(x), float(y)) for i, x, y in reader]
    ids = np.array([r[0] for r in rows], dtype=np.int64)
    if not np.array_equal(np.sort(ids), np.arange(len(ids))):
        raise ValueError(f"{os.fspath(path)}: ids must be exactly 0..n-1")
    pos = np.empty((len(rows), 2))
    pos[ids] = [(x, y) for _, x, y in rows]
    return pos


def read_ground_truth(csv_path, holes_path) -> GroundTruth:
    pos = read_positions_csv(csv_path)
    payload = json.loads(Path(holes_path).read_text(encoding="utf-8"))
    holes = tuple((h["cx"], h["cy"], h["r"]) for h in payload.get("holes", []))
    region = tuple(payload.get("region", (0.0, 0.0, 1.0, 1.0)))
    return GroundTruth(pos, region, holes)
