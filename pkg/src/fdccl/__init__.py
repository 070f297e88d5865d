"""Coordinate-free coverage-hole detection for wireless sensor networks.

A network given only as an edge list is drawn with a force-directed layout,
rasterized, and searched for enclosed empty regions by two-pass connected
component labeling (with border following as a baseline). Nodes drawn on
the border of such a region are reported as hole-boundary nodes.
"""

__version__ = "0.1.0"

from .ccl import ComponentStats, Connectivity, ccl_two_pass, component_stats
from .contour import Contour, bounding_rect, contour_area, pixel_area, trace_contours
from .detect import (
    DetectionReport,
    DetectParams,
    Hole,
    Method,
    detect_holes,
    detect_holes_ccl,
    detect_holes_ct,
    map_nodes_to_holes,
    run_pipeline,
)
from .errors import (
    DegenerateLayoutError,
    DivergenceError,
    EdgeListParseError,
    EdgeListRangeError,
    FDCCLError,
    GenerationError,
    ImageFormatError,
)
from .estimators import FDHoleDetector, ForceDirectedLayout, HoleDetector
from .evaluation import (
    BenchReport,
    Confusion,
    EvalReport,
    bench_locate,
    confusion,
    ground_truth_labels,
    run_experiment_matrix,
    sensitivity,
    specificity,
)
from .layout import Algorithm, Layout, LayoutRun, canvas_side, fit_to_canvas, run_layout
from .raster import RasterParams, rasterize, read_pgm, render_binary, threshold, write_pgm
from .topology import (
    GenSpec,
    GroundTruth,
    Topology,
    average_degree,
    generate_topology,
    read_edge_list,
    write_edge_list,
)
from .unionfind import UnionFind

__all__ = [
    "__version__",
    "Topology", "GroundTruth", "GenSpec", "generate_topology", "average_degree",
    "read_edge_list", "write_edge_list",
    "Algorithm", "Layout", "LayoutRun", "run_layout", "fit_to_canvas", "canvas_side",
    "RasterParams", "rasterize", "render_binary", "threshold", "read_pgm", "write_pgm",
    "UnionFind", "Connectivity", "ComponentStats", "ccl_two_pass", "component_stats",
    "Contour", "trace_contours", "contour_area", "pixel_area", "bounding_rect",
    "Method", "DetectParams", "Hole", "DetectionReport", "detect_holes", "detect_holes_ccl",
    "detect_holes_ct", "map_nodes_to_holes", "run_pipeline",
    "Confusion", "EvalReport", "BenchReport", "confusion", "sensitivity", "specificity",
    "ground_truth_labels", "run_experiment_matrix", "bench_locate",
    "ForceDirectedLayout", "HoleDetector", "FDHoleDetector",
    "FDCCLError", "EdgeListParseError", "EdgeListRangeError", "GenerationError",
    "DivergenceError", "DegenerateLayoutError", "ImageFormatError",
]
