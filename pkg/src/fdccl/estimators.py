"""scikit-learn style wrappers around the layout and detection stages.

>>> from fdccl import FDHoleDetector, GenSpec, generate_topology
>>> topo, _ = generate_topology(GenSpec(200, 6, hole_count=1, seed=3))
>>> mask = FDHoleDetector(algorithm="kk", random_state=1).fit_predict(topo)
>>> mask.shape
(200,)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .ccl import label_components
from .detect import DetectParams, detect_holes, map_nodes_to_holes
from .layout import Algorithm, LayoutRun, params_from_dict, run_layout
from .raster import RasterParams, render_binary
from .topology import Topology
from .validation import check_binary_image

__all__ = ["ForceDirectedLayout", "HoleDetector", "FDHoleDetector"]


def _as_topology(X, n_nodes=None) -> Topology:
    if isinstance(X, Topology):
        return X
    edges = np.asarray(X)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise ValueError(f"expected a Topology or an (m, 2) edge array, got shape {edges.shape}")
    if n_nodes is None:
        n_nodes = int(edges.max()) + 1 if edges.size else 0
    return Topology(int(n_nodes), edges)


class ForceDirectedLayout(BaseEstimator):
    """Place the nodes of a graph with one of the force-directed models.

    ``fit`` takes a :class:`~fdccl.topology.Topology` (or an edge array and
    ``n_nodes``) and stores the canvas-fitted coordinates in
    ``embedding_``.

    Parameters
    ----------
    algorithm : {"kk", "fa2", "fr", "jiggle"}
    max_iter : int
        Iteration budget.
    tol : float
        Stop once the mean step length divided by the canvas size falls
        below this value.
    params : dict or None
        Model constants; unset ones take size-relative defaults.
    canvas_size : float or None
        Simulation box side. Defaults to the canvas the layout is fitted to.
    random_state : int
        Seed for the initial placement.
    """

    def __init__(self, algorithm="kk", max_iter=1000, tol=1e-4, params=None,
                 canvas_size=None, random_state=0):
        self.algorithm = algorithm
        self.max_iter = max_iter
        self.tol = tol
        self.params = params
        self.canvas_size = canvas_size
        self.random_state = random_state

    def _run(self) -> LayoutRun:
        algo = Algorithm.coerce(self.algorithm)
        p = None if self.params is None else params_from_dict(algo, dict(self.params))
        return LayoutRun(algo, p, self.max_iter, self.tol, self.canvas_size, self.random_state)

    def fit(self, X, y=None, n_nodes=None, init=None):
        topo = _as_topology(X, n_nodes)
        self.layout_ = run_layout(topo, self._run(), init)
        self.embedding_ = np.array(self.layout_.positions)
        self.n_iter_ = int(self.layout_.meta["iterations_run"])
        self.n_nodes_in_ = topo.node_count
        return self

    def fit_transform(self, X, y=None, n_nodes=None, init=None):
        return self.fit(X, y, n_nodes=n_nodes, init=init).embedding_


class HoleDetector(BaseEstimator):
    """Find coverage holes in a binary drawing (ink = 1).

    After ``fit``, ``holes_`` lists the detected holes and ``report_`` holds
    the full :class:`~fdccl.detect.DetectionReport`.
    """

    def __init__(self, method="ccl", alpha=0.001, connectivity=8, node_adjacency_px=2):
        self.method = method
        self.alpha = alpha
        self.connectivity = connectivity
        self.node_adjacency_px = node_adjacency_px

    def _params(self) -> DetectParams:
        return DetectParams(self.method, self.alpha, self.connectivity, self.node_adjacency_px)

    def fit(self, X, y=None):
        img = check_binary_image(X, "X")
        self.report_ = detect_holes(img, self._params())
        self.holes_ = self.report_.holes
        self.n_holes_ = self.report_.n_holes
        return self

    def transform(self, X):
        """Hole mask: 1 on pixels of detected holes."""
        check_is_fitted(self, "holes_")
        img = check_binary_image(X, "X")
        labels, _ = label_components(1 - img, self._params().connectivity)
        mask = np.zeros(img.shape, dtype=np.uint8)
        for h in self.holes_:
            x, y = h.boundary_pixels[0]
            mask[labels == labels[y, x]] = 1
        return mask

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


class FDHoleDetector(BaseEstimator):
    """Coordinate-free hole detection: layout, draw, detect, map back to nodes.

    ``fit`` runs the whole pipeline on a topology; ``predict`` returns the
    boolean mask of nodes lying on a detected hole contour.
    """

    def __init__(self, algorithm="kk", method="ccl", alpha=0.001, connectivity=8,
                 node_adjacency_px=2, threshold=128, node_radius_px=2, line_thickness_px=1,
                 max_iter=1000, tol=1e-4, random_state=0):
        self.algorithm = algorithm
        self.method = method
        self.alpha = alpha
        self.connectivity = connectivity
        self.node_adjacency_px = node_adjacency_px
        self.threshold = threshold
        self.node_radius_px = node_radius_px
        self.line_thickness_px = line_thickness_px
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y=None, n_nodes=None):
        topo = _as_topology(X, n_nodes)
        layout = ForceDirectedLayout(self.algorithm, self.max_iter, self.tol,
                                     random_state=self.random_state).fit(topo)
        rp = RasterParams(self.threshold, self.node_radius_px, self.line_thickness_px)
        dp = DetectParams(self.method, self.alpha, self.connectivity, self.node_adjacency_px)
        ink = render_binary(layout.layout_, topo, rp)
        report = detect_holes(ink, dp)
        report.holes = map_nodes_to_holes(layout.layout_, report.holes, dp.node_adjacency_px, rp)
        self.layout_ = layout.layout_
        self.embedding_ = layout.embedding_
        self.report_ = report
        self.holes_ = report.holes
        self.n_nodes_in_ = topo.node_count
        mask = np.zeros(topo.node_count, dtype=bool)
        mask[sorted(report.detected_nodes())] = True
        self.contour_mask_ = mask
        return self

    def predict(self, X=None):
        """Boolean mask over nodes: True for nodes on a detected hole contour."""
        check_is_fitted(self, "contour_mask_")
        if X is not None:
            n = _as_topology(X).node_count
            if n != self.n_nodes_in_:
                raise ValueError(f"fitted on {self.n_nodes_in_} nodes, got {n}")
        return self.contour_mask_.copy()

    def fit_predict(self, X, y=None, n_nodes=None):
        return self.fit(X, y, n_nodes=n_nodes).predict()
