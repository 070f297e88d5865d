"""Input validation helpers.

These mirror the ``sklearn.utils.validation`` idiom: each ``check_*`` takes
loosely typed user input and returns a canonical array, or raises
``ValueError``/``TypeError`` with a message that names the offending
argument.
"""

from __future__ import annotations

import numbers

import numpy as np


def check_positions(positions, n_nodes: int | None = None, name: str = "positions") -> np.ndarray:
    """Return ``positions`` as a C-contiguous float64 array of shape (n, 2)."""
    arr = np.ascontiguousarray(positions, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must have shape (n, 2), got {arr.shape}")
    if n_nodes is not None and arr.shape[0] != n_nodes:
        raise ValueError(f"{name} has {arr.shape[0]} rows, expected {n_nodes}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_edges(edges, n_nodes: int | None = None, name: str = "edges") -> np.ndarray:
    """Return ``edges`` as an int64 array of shape (m, 2).

    Accepts any sequence of pairs, including an empty one.
    """
    arr = np.asarray(edges)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must have shape (m, 2), got {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise TypeError(f"{name} must contain integer node ids")
        arr = as_int
    arr = arr.astype(np.int64, copy=False)
    if arr.min() < 0:
        raise ValueError(f"{name} contains a negative node id")
    if n_nodes is not None and arr.max() >= n_nodes:
        raise ValueError(f"{name} references node {int(arr.max())} but node_count is {n_nodes}")
    return np.ascontiguousarray(arr)


def check_binary_image(img, name: str = "img") -> np.ndarray:
    """Return a 2-D uint8 array holding only 0 and 1.

    Boolean arrays are accepted and converted.
    """
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1")
    if arr.dtype == np.bool_:
        return np.ascontiguousarray(arr, dtype=np.uint8)
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.number):
            raise TypeError(f"{name} must be a numeric or boolean array, got {arr.dtype}")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError(f"{name} must contain only 0 and 1")
        return np.ascontiguousarray(arr, dtype=np.uint8)
    if arr.max(initial=0) > 1:
        raise ValueError(f"{name} must contain only 0 and 1")
    return np.ascontiguousarray(arr)


def check_gray_image(img, name: str = "img") -> np.ndarray:
    """Return a 2-D uint8 array of intensities in [0, 255]."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise TypeError(f"{name} must be an integer array, got {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError(f"{name} intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def check_scalar(x, name: str, target_type, *, min_val=None, max_val=None,
                 include_boundaries: str = "both"):
    """Validate a scalar parameter; thin wrapper with sklearn's semantics.

    ``include_boundaries`` is one of "both", "left", "right", "neither".
    """
    if isinstance(x, bool) or not isinstance(x, target_type):
        raise TypeError(f"{name} must be an instance of {target_type}, not {type(x).__name__}")
    if isinstance(x, numbers.Real) and not np.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x}")
    left_closed = include_boundaries in ("both", "left")
    right_closed = include_boundaries in ("both", "right")
    if min_val is not None:
        if (x < min_val) if left_closed else (x <= min_val):
            op = ">=" if left_closed else ">"
            raise ValueError(f"{name} == {x}, must be {op} {min_val}")
    if max_val is not None:
        if (x > max_val) if right_closed else (x >= max_val):
            op = "<=" if right_closed else "<"
            raise ValueError(f"{name} == {x}, must be {op} {max_val}")
    return x


def check_random_seed(seed) -> int:
    """Seeds are plain integers that fit in 64 bits (unsigned or signed)."""
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not -(2**63) <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    return seed % 2**64
