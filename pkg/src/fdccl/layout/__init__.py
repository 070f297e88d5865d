"""Force-directed layouts: Kamada-Kawai, ForceAtlas2, Fruchterman-Reingold, JIGGLE."""

from .engine import Layout, fit_to_canvas, iterate_layout, read_layout, run_layout, write_layout
from .forces import (
    fa2_forces,
    fa2_step,
    fr_forces,
    fr_step,
    graph_distances,
    jiggle_forces,
    jiggle_step,
    kk_energy,
    kk_forces,
    kk_step,
)
from .params import (
    Algorithm,
    FA2Params,
    FRParams,
    JiggleParams,
    KKParams,
    LayoutRun,
    canvas_side,
    default_params,
    params_from_dict,
)

__all__ = [
    "Layout", "LayoutRun", "Algorithm",
    "KKParams", "FA2Params", "FRParams", "JiggleParams",
    "run_layout", "iterate_layout", "fit_to_canvas", "read_layout", "write_layout",
    "kk_step", "kk_forces", "kk_energy", "fa2_step", "fa2_forces",
    "fr_step", "fr_forces", "jiggle_step", "jiggle_forces",
    "graph_distances", "canvas_side", "default_params", "params_from_dict",
]
