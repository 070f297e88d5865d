"""Force kernels and single-step updates for the four force-directed models.

All pair forces are computed exactly over every node pair (no spatial
approximation). Each pair contribution is added to one node and subtracted
from the other, so pair forces are antisymmetric by construction.

Two nodes closer than ``COINCIDENT`` are separated, for force purposes
only, by a deterministic jitter of length ``JITTER`` whose direction is
hashed from ``(seed, i, j)``.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from ..validation import check_positions
from .params import FA2Params, FRParams, JiggleParams, KKParams

__all__ = [
    "kk_forces", "kk_step", "kk_energy",
    "fa2_forces", "fa2_step",
    "fr_forces", "fr_step",
    "jiggle_forces", "jiggle_step",
    "graph_distances",
]

COINCIDENT = 1e-9
JITTER = 1e-6

_MASK64 = (1 << 64) - 1


@numba.njit(cache=True, nogil=True)
def _splitmix64(x):
    x = (x + numba.uint64(0x9E3779B97F4A7C15))
    z = x
    z = (z ^ (z >> numba.uint64(30))) * numba.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> numba.uint64(27))) * numba.uint64(0x94D049BB133111EB)
    return z ^ (z >> numba.uint64(31))


@numba.njit(cache=True, nogil=True)
def _separation(xi, yi, xj, yj, seed, i, j):
    """Vector from j to i and its length, jittered when coincident."""
    dx = xi - xj
    dy = yi - yj
    d = math.sqrt(dx * dx + dy * dy)
    if d < COINCIDENT:
        h = _splitmix64(seed ^ _splitmix64(numba.uint64(i) * numba.uint64(0x100000001B3)
                                           + numba.uint64(j)))
        angle = (h >> numba.uint64(11)) * (2.0 * math.pi / 9007199254740992.0)
        dx = JITTER * math.cos(angle)
        dy = JITTER * math.sin(angle)
        d = JITTER
    return dx, dy, d


# --------------------------------------------------------------------- KK

@numba.njit(cache=True, nogil=True)
def _kk_forces(pos, hops, stiffness, radius, unit, seed):
    n = pos.shape[0]
    f = np.zeros((n, 2))
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy, d = _separation(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], seed, i, j)
            target = stiffness * (unit * hops[i, j] - 2.0 * radius)
            # pulls together when stretched beyond the target, pushes apart when short
            c = stiffness * (d - target) / d
            f[i, 0] -= c * dx
            f[i, 1] -= c * dy
            f[j, 0] += c * dx
            f[j, 1] += c * dy
    return f


@numba.njit(cache=True, nogil=True)
def _kk_energy(pos, hops, stiffness, radius, unit):
    n = pos.shape[0]
    e = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            d = math.sqrt(dx * dx + dy * dy)
            target = stiffness * (unit * hops[i, j] - 2.0 * radius)
            e += (target - d) ** 2 / target
    return e


def graph_distances(topology) -> np.ndarray:
    """All-pairs hop counts as a float64 matrix (``inf`` when unreachable)."""
    from scipy.sparse.csgraph import shortest_path

    if topology.node_count == 1:
        return np.zeros((1, 1))
    return shortest_path(topology.adjacency(), method="D", unweighted=True, directed=False)


def kk_forces(positions, topology, p: KKParams, hops=None, seed: int = 0) -> np.ndarray:
    pos = check_positions(positions, topology.node_count)
    hops = graph_distances(topology) if hops is None else np.ascontiguousarray(hops, dtype=np.float64)
    return _kk_forces(pos, hops, p.stiffness, p.node_radius, p.unit_edge_length, np.uint64(seed))


def kk_step(positions, topology, p: KKParams, hops=None, seed: int = 0) -> np.ndarray:
    """One explicit step ``x <- x + time_step * F(x)``."""
    pos = check_positions(positions, topology.node_count)
    return pos + p.time_step * kk_forces(pos, topology, p, hops, seed)


def kk_energy(positions, topology, p: KKParams, hops=None) -> float:
    """Sum over pairs of ``(L - d)^2 / L``."""
    pos = check_positions(positions, topology.node_count)
    hops = graph_distances(topology) if hops is None else np.ascontiguousarray(hops, dtype=np.float64)
    return float(_kk_energy(pos, hops, p.stiffness, p.node_radius, p.unit_edge_length))


# -------------------------------------------------------------------- FA2

@numba.njit(cache=True, nogil=True)
def _fa2_forces(pos, edges, deg, k_rep, gravity, cx, cy, seed):
    n = pos.shape[0]
    f = np.zeros((n, 2))
    for i in range(n):
        mi = deg[i] + 1.0
        for j in range(i + 1, n):
            dx, dy, d = _separation(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], seed, i, j)
            c = k_rep * mi * (deg[j] + 1.0) / d / d
            f[i, 0] += c * dx
            f[i, 1] += c * dy
            f[j, 0] -= c * dx
            f[j, 1] -= c * dy
    for e in range(edges.shape[0]):
        i = edges[e, 0]
        j = edges[e, 1]
        dx, dy, d = _separation(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], seed, i, j)
        # magnitude d along the unit separation: the vector itself
        f[i, 0] -= dx
        f[i, 1] -= dy
        f[j, 0] += dx
        f[j, 1] += dy
    if gravity > 0.0:
        for i in range(n):
            gx = cx - pos[i, 0]
            gy = cy - pos[i, 1]
            g = math.sqrt(gx * gx + gy * gy)
            if g > 0.0:
                c = gravity * (deg[i] + 1.0) / g
                f[i, 0] += c * gx
                f[i, 1] += c * gy
    return f


def _edges(topology) -> np.ndarray:
    return np.ascontiguousarray(topology.edges, dtype=np.int64)


def fa2_forces(positions, topology, p: FA2Params, center=(0.0, 0.0), seed: int = 0) -> np.ndarray:
    pos = check_positions(positions, topology.node_count)
    deg = topology.degrees().astype(np.float64)
    cx, cy = (float(c) for c in center)
    return _fa2_forces(pos, _edges(topology), deg, p.k_rep, p.gravity, cx, cy, np.uint64(seed))


def fa2_step(positions, topology, p: FA2Params, center=(0.0, 0.0), seed: int = 0) -> np.ndarray:
    """Displace every node by ``damping`` times its net force.

    With ``mass_normalized`` the force is first divided by ``deg + 1``.
    """
    pos = check_positions(positions, topology.node_count)
    f = fa2_forces(pos, topology, p, center, seed)
    if p.mass_normalized:
        f /= (topology.degrees() + 1.0)[:, None]
    return pos + p.damping * f


# --------------------------------------------------------------------- FR

@numba.njit(cache=True, nogil=True)
def _fr_forces(pos, edges, k_r, k_a, seed):
    n = pos.shape[0]
    f = np.zeros((n, 2))
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy, d = _separation(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], seed, i, j)
            c = k_r / (d * d * d)
            f[i, 0] += c * dx
            f[i, 1] += c * dy
            f[j, 0] -= c * dx
            f[j, 1] -= c * dy
    for e in range(edges.shape[0]):
        i = edges[e, 0]
        j = edges[e, 1]
        dx, dy, d = _separation(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], seed, i, j)
        c = k_a * math.log(d) / d
        f[i, 0] -= c * dx
        f[i, 1] -= c * dy
        f[j, 0] += c * dx
        f[j, 1] += c * dy
    return f


@numba.njit(cache=True, nogil=True)
def _clamp(f, limit):
    n = f.shape[0]
    out = np.empty_like(f)
    for i in range(n):
        m = math.sqrt(f[i, 0] * f[i, 0] + f[i, 1] * f[i, 1])
        if m > limit:
            s = limit / m
            out[i, 0] = f[i, 0] * s
            out[i, 1] = f[i, 1] * s
        else:
            out[i, 0] = f[i, 0]
            out[i, 1] = f[i, 1]
    return out


def fr_forces(positions, topology, p: FRParams, seed: int = 0) -> np.ndarray:
    pos = check_positions(positions, topology.node_count)
    return _fr_forces(pos, _edges(topology), p.k_r, p.k_a, np.uint64(seed))


def fr_step(positions, topology, p: FRParams, iteration_index: int, seed: int = 0) -> np.ndarray:
    """Move each node along its net force by at most the current temperature."""
    if iteration_index < 0:
        raise ValueError("iteration_index must be non-negative")
    pos = check_positions(positions, topology.node_count)
    f = fr_forces(pos, topology, p, seed)
    return pos + _clamp(f, p.temperature(iteration_index))


# ----------------------------------------------------------------- JIGGLE

@numba.njit(cache=True, nogil=True)
def _jiggle_forces(pos, edges, k_r, k_a, k_s, length, seed):
    n = pos.shape[0]
    f = np.zeros((n, 2))
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy, d = _separation(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], seed, i, j)
            c = k_r / (d * d * d)
            f[i, 0] += c * dx
            f[i, 1] += c * dy
            f[j, 0] -= c * dx
            f[j, 1] -= c * dy
    for e in range(edges.shape[0]):
        i = edges[e, 0]
        j = edges[e, 1]
        dx, dy, d = _separation(pos[i, 0], pos[i, 1], pos[j, 0], pos[j, 1], seed, i, j)
        # log attraction pulls in, spring k_s (l - d) pushes out when short
        c = (-k_a * math.log(d / length) + k_s * (length - d)) / d
        f[i, 0] += c * dx
        f[i, 1] += c * dy
        f[j, 0] -= c * dx
        f[j, 1] -= c * dy
    return f


def jiggle_forces(positions, topology, p: JiggleParams, seed: int = 0) -> np.ndarray:
    pos = check_positions(positions, topology.node_count)
    return _jiggle_forces(pos, _edges(topology), p.k_r, p.k_a, p.k_s, p.edge_length,
                          np.uint64(seed))


def jiggle_step(positions, topology, p: JiggleParams, seed: int = 0) -> np.ndarray:
    pos = check_positions(positions, topology.node_count)
    return pos + p.step * jiggle_forces(pos, topology, p, seed)
