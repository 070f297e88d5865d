"""Command-line entry point: ``fdccl <subcommand> [flags]``.

Subcommands: gen, layout, render, detect, eval, bench. Every subcommand
accepts ``--config FILE``, a flat ``key = value`` file whose keys are flag
names (``--hole-radius`` may be written ``hole-radius`` or
``hole_radius``); flags given on the command line win. All artifacts go
under ``--out`` and carry the effective configuration.

Exit status: 0 on success, 1 on runtime failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .detect import DetectParams, Method, detect_holes, map_nodes_to_holes, overlay
from .errors import FDCCLError
from .evaluation import (
    LAYOUT_CLASSES,
    bench_corpus,
    bench_locate,
    run_experiment_matrix,
    write_bench_csv,
    write_matrix_csv,
    write_reports_json,
)
from .layout import Algorithm, LayoutRun, read_layout, run_layout, write_layout
from .raster import RasterParams, invert, rasterize, read_pgm, threshold, write_pgm, write_png
from .topology import GenSpec, generate_topology, read_edge_list, write_edge_list, write_ground_truth

logger = logging.getLogger("fdccl")

PAPER_NODES = [200, 500, 1000, 2000, 3000]
PAPER_DEGREES = [6, 8, 10, 12, 15]
MATRICES = {
    "default": dict(nodes=PAPER_NODES, degrees=PAPER_DEGREES,
                    algos=[a.value for a in Algorithm], classes=sorted(LAYOUT_CLASSES), seeds=[0]),
    "quick": dict(nodes=[200, 500], degrees=[6, 15], algos=["kk", "fr"], classes=["sparse"], seeds=[0]),
}


class UsageError(Exception):
    """Bad flag values detected after parsing."""


# -------------------------------------------------------------------- helpers

def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in str(text).split(",") if v.strip()]


def _algorithm(text: str) -> str:
    try:
        return Algorithm.coerce(text).value
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _method(text: str) -> str:
    try:
        return Method.coerce(text).value
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def read_config(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file (``#`` starts a comment line)."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _jsonable(v):
    if isinstance(v, Path):
        return os.fspath(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _effective_config(args) -> dict:
    skip = {"func", "config_file", "verbose"}
    cfg = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in skip}
    cfg["version"] = __version__
    return cfg


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _raster_params(args) -> RasterParams:
    try:
        return RasterParams(args.threshold, args.node_radius, args.line_thickness, args.supersample)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _detect_params(args) -> DetectParams:
    try:
        return DetectParams(args.method, args.alpha, args.connectivity, args.delta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _layout_run(args) -> LayoutRun:
    try:
        return LayoutRun(args.algo, max_iterations=args.iterations,
                         stability_epsilon=args.epsilon, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _require_positive(args, *names):
    for name in names:
        v = getattr(args, name)
        if v is None or v < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be >= 1, got {v}")


def _load_layout(path: str):
    p = Path(path)
    sidecar = p.with_suffix(".json")
    return read_layout(p, sidecar if sidecar.exists() else None)


# ----------------------------------------------------------------- subcommands

def cmd_gen(args) -> int:
    if args.nodes < 2:
        raise UsageError(f"--nodes must be >= 2, got {args.nodes}")
    if args.degree < 1:
        raise UsageError(f"--degree must be >= 1, got {args.degree}")
    if args.holes < 0:
        raise UsageError("--holes must be non-negative")
    if not 0 < args.hole_radius < 0.5:
        raise UsageError("--hole-radius must lie in (0, 0.5)")
    out = _out_dir(args)
    topo, gt = generate_topology(GenSpec(args.nodes, args.degree, args.holes, args.hole_radius, args.seed))
    write_edge_list(topo, out / "edges.txt")
    write_ground_truth(gt, out / "ground_truth.csv", out / "holes.json", meta=_effective_config(args))
    logger.info("wrote %d nodes, %d edges to %s", topo.node_count, topo.n_edges, out)
    return 0


def cmd_layout(args) -> int:
    _require_positive(args, "iterations")
    run = _layout_run(args)
    out = Path(args.out)
    if out.suffix.lower() == ".csv":
        out.parent.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = out, out.with_suffix(".json")
    else:
        out.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = out / "layout.csv", out / "layout.json"
    topo = read_edge_list(args.edges)
    layout = run_layout(topo, run)
    write_layout(layout, csv_path, json_path)
    sidecar = json.loads(json_path.read_text(encoding="utf-8"))
    sidecar["config"] = _effective_config(args)
    _write_json(json_path, sidecar)
    logger.info("%s: %d iterations -> %s", args.algo, layout.meta["iterations_run"], csv_path)
    return 0


def cmd_render(args) -> int:
    rp = _raster_params(args)
    out = _out_dir(args)
    topo = read_edge_list(args.edges)
    layout = _load_layout(args.layout)
    gray = rasterize(layout, topo, rp)
    write_pgm(gray, out / "render.pgm")
    write_pgm(threshold(gray, rp.threshold), out / "binary.pgm", binary=True)
    if args.png:
        write_png(gray, out / "render.png")
    _write_json(out / "render.json", {"config": _effective_config(args),
                                      "image": [int(gray.shape[1]), int(gray.shape[0])],
                                      "canvas": [layout.canvas_width, layout.canvas_height]})
    return 0


def cmd_detect(args) -> int:
    rp = _raster_params(args)
    dp = _detect_params(args)
    out = _out_dir(args)
    topo = read_edge_list(args.edges)
    layout = _load_layout(args.layout)
    ink = invert(threshold(rasterize(layout, topo, rp), rp.threshold))
    report = detect_holes(ink, dp)
    report.holes = map_nodes_to_holes(layout, report.holes, dp.node_adjacency_px, rp)
    report.canvas = (layout.canvas_width, layout.canvas_height)
    doc = report.to_dict()
    doc["config"] = _effective_config(args)
    _write_json(out / "report.json", doc)
    # reference image: the binarized drawing the detector saw (white = empty space)
    write_pgm(1 - ink, out / "reference.pgm", binary=True)
    if args.overlay:
        write_png(overlay(ink, report), out / "overlay.png")
    logger.info("%s: %d holes in %.3f ms", dp.method.value, report.n_holes, report.locate_time_ns / 1e6)
    return 0


def _matrix_axes(args) -> dict:
    axes = dict(MATRICES[args.matrix]) if args.matrix else dict(MATRICES["quick"])
    for key in ("nodes", "degrees", "algos", "classes", "seeds"):
        if getattr(args, key) is not None:
            axes[key] = getattr(args, key)
    for a in axes["algos"]:
        try:
            _algorithm(a)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc)) from None
    for c in axes["classes"]:
        if c not in LAYOUT_CLASSES:
            raise UsageError(f"unknown layout class {c!r}; expected one of {sorted(LAYOUT_CLASSES)}")
    if any(not axes[k] for k in axes):
        raise UsageError("every matrix axis must be non-empty")
    return axes


def _eval_cell(job):
    n, d, algo, lc, seed, kwargs = job
    return run_experiment_matrix([n], [d], [algo], [lc], [seed], **kwargs)


def cmd_eval(args) -> int:
    _require_positive(args, "iterations", "jobs")
    axes = _matrix_axes(args)
    rp, dp = _raster_params(args), _detect_params(args)
    out = _out_dir(args)
    kwargs = dict(raster_params=rp, detect_params=dp,
                  max_iterations=args.iterations, stability_epsilon=args.epsilon,
                  use_ground_truth_layout=args.ground_truth_layout)
    if args.jobs == 1:
        reports = run_experiment_matrix(axes["nodes"], axes["degrees"], axes["algos"],
                                        axes["classes"], axes["seeds"], **kwargs)
    else:
        from concurrent.futures import ProcessPoolExecutor
        import itertools

        jobs = [(n, d, a, lc, s, kwargs) for n, d, lc, s, a in itertools.product(
            axes["nodes"], axes["degrees"], axes["classes"], axes["seeds"], axes["algos"])]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = [r for cell in pool.map(_eval_cell, jobs) for r in cell]
    config = {**_effective_config(args), "axes": axes}
    write_matrix_csv(reports, out / "matrix.csv")
    for lc in axes["classes"]:
        write_matrix_csv([r for r in reports if r.meta.get("layout_class") == lc], out / f"matrix_{lc}.csv")
    write_reports_json(reports, out / "reports.json", config)
    failed = sum(r.error is not None for r in reports)
    logger.info("%d cells, %d failed", len(reports), failed)
    return 0


_NAME_ND = re.compile(r"n(\d+)[_-]d(\d+(?:\.\d+)?)")


def _read_corpus(path: Path):
    files = sorted(path.glob("*.pgm"))
    if not files:
        raise FileNotFoundError(f"{path}: no .pgm images in corpus")
    for f in files:
        meta_path = f.with_suffix(".json")
        n, d = 0, 0.0
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            n, d = int(meta.get("n", 0)), float(meta.get("d", 0.0))
        elif m := _NAME_ND.search(f.stem):
            n, d = int(m.group(1)), float(m.group(2))
        # corpus images store empty space as white; the detector wants ink = 1
        yield n, d, 1 - read_pgm(f, binary=True)


def cmd_bench(args) -> int:
    if args.reps < 5:
        raise UsageError(f"--reps must be >= 5, got {args.reps}")
    _require_positive(args, "iterations")
    if args.warmup < 0:
        raise UsageError("--warmup must be non-negative")
    for m in args.methods:
        try:
            _method(m)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc)) from None
    rp, dp = _raster_params(args), _detect_params(args)
    out = _out_dir(args)
    if args.corpus:
        images = list(_read_corpus(Path(args.corpus)))
    else:
        images = []
        for n in args.nodes or [2000]:
            images.extend(bench_corpus(n, args.degrees or [6, 15], args.algos or ["kk"],
                                       args.seeds or [0], raster_params=rp,
                                       max_iterations=args.iterations))
        if args.save_corpus:
            cdir = out / "corpus"
            cdir.mkdir(exist_ok=True)
            for k, (n, d, ink) in enumerate(images):
                stem = f"n{n}_d{d:g}_{k:03d}"
                write_pgm(1 - ink, cdir / f"{stem}.pgm", binary=True)
                _write_json(cdir / f"{stem}.json", {"n": n, "d": d})
    report = bench_locate(images, args.methods, args.reps, warmup=args.warmup,
                          detect_params=dp)
    write_bench_csv(report, out / "bench.csv")
    doc = report.to_dict()
    doc["config"] = _effective_config(args)
    _write_json(out / "bench.json", doc)
    for (n, d), s in sorted(report.speedup().items()):
        logger.info("n=%d d=%g: CT/CCL median ratio %.2f", n, d, s)
    return 0


# --------------------------------------------------------------------- parser

def _add_raster_flags(p):
    g = p.add_argument_group("rendering")
    g.add_argument("--threshold", type=int, default=128, help="grey level separating ink (<=) from space")
    g.add_argument("--node-radius", type=int, default=2, help="node disk radius in pixels")
    g.add_argument("--line-thickness", type=int, default=1, help="edge thickness in pixels")
    g.add_argument("--supersample", type=int, default=1, help="render at s-times resolution, then average")


def _add_detect_flags(p, with_method=True):
    g = p.add_argument_group("detection")
    if with_method:
        g.add_argument("--method", type=_method, default="ccl", help="ccl or ct")
    else:
        p.set_defaults(method="ccl")
    g.add_argument("--alpha", type=float, default=0.001, help="minimum hole area as a fraction of the image")
    g.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    g.add_argument("--delta", type=int, default=2, help="node-to-hole adjacency in pixels")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", dest="config_file", metavar="FILE", help="flat key = value defaults")
    common.add_argument("--out", default="out", help="output directory (layout also accepts a .csv path)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="fdccl", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("gen", parents=[common], help="generate a topology with ground truth")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--degree", type=float, required=True)
    p.add_argument("--holes", type=int, default=0)
    p.add_argument("--hole-radius", type=float, default=0.12)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("layout", parents=[common], help="run a force-directed layout")
    p.add_argument("--edges", required=True)
    p.add_argument("--algo", type=_algorithm, required=True, help="kk, fa2, fr or jiggle")
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("render", parents=[common], help="rasterize a layout to PGM")
    p.add_argument("--layout", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--png", action="store_true", help="also write a PNG preview")
    _add_raster_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("detect", parents=[common], help="detect holes in a rendered layout")
    p.add_argument("--layout", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--overlay", action="store_true", help="write overlay.png with holes filled")
    _add_raster_flags(p)
    _add_detect_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", parents=[common], help="run the evaluation matrix")
    p.add_argument("--matrix", choices=sorted(MATRICES), help="named axis preset")
    p.add_argument("--nodes", type=_int_list)
    p.add_argument("--degrees", type=_float_list)
    p.add_argument("--algos", type=_str_list)
    p.add_argument("--classes", type=_str_list)
    p.add_argument("--seeds", type=_int_list)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--jobs", type=int, default=1, help="cells evaluated in parallel")
    p.add_argument("--ground-truth-layout", action="store_true",
                   help="use true positions instead of a force-directed layout")
    _add_raster_flags(p)
    _add_detect_flags(p, with_method=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", parents=[common], help="time CCL against contour tracing")
    p.add_argument("--corpus", help="directory of binary PGMs (white = empty space)")
    p.add_argument("--save-corpus", action="store_true", help="store generated images under OUT/corpus")
    p.add_argument("--nodes", type=_int_list)
    p.add_argument("--degrees", type=_float_list)
    p.add_argument("--algos", type=_str_list)
    p.add_argument("--seeds", type=_int_list)
    p.add_argument("--methods", type=_str_list, default=["ccl", "ct"])
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--warmup", type=int, default=2)
    p.add_argument("--iterations", type=int, default=1000)
    _add_raster_flags(p)
    _add_detect_flags(p, with_method=False)
    p.set_defaults(func=cmd_bench)
    return parser


def _apply_config(parser, argv) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` fill in flags not given."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", dest="config_file")
    early, rest = pre.parse_known_args(argv)
    subparsers = parser._subparsers._group_actions[0].choices  # noqa: SLF001
    command = next((a for a in rest if not a.startswith("-")), None)
    if not early.config_file or command not in subparsers:
        return parser.parse_args(argv)
    try:
        cfg = read_config(early.config_file)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    except UsageError as exc:
        parser.error(str(exc))
    sub = subparsers[command]
    known = {a.dest: a for a in sub._actions}  # noqa: SLF001
    defaults = {}
    for key, value in cfg.items():
        if key not in known or key in ("help", "config_file"):
            parser.error(f"config key {key!r} is not a flag of '{command}'")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
            continue
        conv = action.type or str
        try:
            defaults[key] = conv(value)
        except (argparse.ArgumentTypeError, ValueError) as exc:
            parser.error(f"config key {key!r}: {exc}")
        if action.choices is not None and defaults[key] not in action.choices:
            parser.error(f"config key {key!r}: {value!r} not in {list(action.choices)}")
        action.required = False
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, sys.argv[1:] if argv is None else list(argv))
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (FDCCLError, OSError, ValueError) as exc:
        print(f"fdccl {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
