"""Disjoint-set forest with union by size and path compression.

The array kernels ``uf_find`` / ``uf_union`` are jitted so the labeling
scan can call them inline; :class:`UnionFind` wraps them for Python use.
"""

from __future__ import annotations

import numba
import numpy as np

__all__ = ["UnionFind", "uf_find", "uf_union"]


@numba.njit(cache=True, nogil=True)
def uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    # path compression
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True, nogil=True)
def uf_union(parent, size, x, y):
    """Link the roots of ``x`` and ``y``; return the surviving root.

    The root of the larger set survives. On equal sizes the smaller root
    index survives.
    """
    rx = uf_find(parent, x)
    ry = uf_find(parent, y)
    if rx == ry:
        return rx
    if size[rx] < size[ry] or (size[rx] == size[ry] and ry < rx):
        rx, ry = ry, rx
    parent[ry] = rx
    size[rx] += size[ry]
    return rx


class UnionFind:
    """Union-find over the integers ``0..n-1``.

    >>> uf = UnionFind(10)
    >>> uf.union(3, 7)
    3
    >>> uf.find(7), uf.set_size(7)
    (3, 2)
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.parent = np.arange(n, dtype=np.int64)
        self.size = np.ones(n, dtype=np.int64)

    def __len__(self):
        return len(self.parent)

    def _check(self, x):
        if not 0 <= x < len(self.parent):
            raise IndexError(f"element {x} out of range for UnionFind of size {len(self.parent)}")

    def find(self, x: int) -> int:
        self._check(x)
        return int(uf_find(self.parent, x))

    def union(self, x: int, y: int) -> int:
        self._check(x)
        self._check(y)
        return int(uf_union(self.parent, self.size, x, y))

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def set_size(self, x: int) -> int:
        return int(self.size[self.find(x)])

    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.parent == np.arange(len(self.parent)))

    @property
    def n_sets(self) -> int:
        return len(self.roots())
