import json

import numpy as np
import pytest

from fdccl import (
    DetectParams,
    GenSpec,
    Layout,
    LayoutRun,
    RasterParams,
    Topology,
    detect_holes,
    detect_holes_ccl,
    detect_holes_ct,
    generate_topology,
    map_nodes_to_holes,
    run_pipeline,
)
from fdccl.detect import Hole, overlay
from fdccl.raster import render_binary

from conftest import enclosed_regions, ring_image

SIZE = 60


def _params(t_px, method="ccl", size=SIZE):
    return DetectParams(method, t_px / (size * size))


def _ring500():
    # 20 x 25 interior = 500 px
    return ring_image(SIZE, 15, 12, 20, 25)


def _bbox_close(a, b, tol=1):
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return (abs(ax - bx) <= tol and abs(ay - by) <= tol
            and abs(ax + aw - bx - bw) <= tol and abs(ay + ah - by - bh) <= tol)


@pytest.mark.parametrize("method", ["ccl", "ct"])
def test_blank_image_has_no_holes(method):
    assert detect_holes(np.zeros((40, 40), np.uint8), DetectParams(method)).n_holes == 0


def test_ring_ccl():
    img = _ring500()
    (area, bbox), = enclosed_regions(img)
    assert area == 500
    rep = detect_holes_ccl(img, _params(100))
    assert rep.n_holes == 1
    h = rep.holes[0]
    assert h.area_px == 500 and h.bbox == bbox == (15, 12, 20, 25)
    assert h.centroid == pytest.approx((15 + 9.5, 12 + 12.0))
    assert rep.threshold_px == pytest.approx(100)
    assert detect_holes_ccl(img, _params(600)).n_holes == 0


def test_ring_ct_matches_ccl():
    img = _ring500()
    ccl = detect_holes_ccl(img, _params(100))
    ct = detect_holes_ct(img, _params(100, "ct"))
    assert ct.n_holes == 1
    assert _bbox_close(ct.holes[0].bbox, ccl.holes[0].bbox)
    assert ct.holes[0].area_px == pytest.approx(500, abs=0.5)
    assert detect_holes_ct(img, _params(600, "ct")).n_holes == 0


def test_nested_rings():
    img = ring_image(SIZE, 8, 8, 44, 44)
    img |= ring_image(SIZE, 22, 22, 16, 16)
    regions = enclosed_regions(img)
    assert len(regions) == 2
    for method in ("ccl", "ct"):
        assert detect_holes(img, _params(50, method)).n_holes == 2


def test_hole_touching_border_is_ignored():
    img = np.zeros((30, 30), np.uint8)
    img[:, 10] = 1
    img[:, 20] = 1
    for method in ("ccl", "ct"):
        assert detect_holes(img, _params(1, method, 30)).n_holes == 0


def test_boundary_pixels_are_empty_space_next_to_ink():
    img = _ring500()
    for method in ("ccl", "ct"):
        h = detect_holes(img, _params(100, method)).holes[0]
        bx, by = h.boundary_pixels[:, 0], h.boundary_pixels[:, 1]
        assert np.all(img[by, bx] == 0)
        assert len(h.boundary_pixels) == 2 * (20 + 25) - 4


def test_report_json_round_trip():
    rep = detect_holes_ccl(_ring500(), _params(100))
    d = json.loads(rep.to_json())
    assert d["method"] == "ccl" and d["image"] == [SIZE, SIZE]
    assert d["holes"][0]["area_px"] == 500
    assert d["locate_time_ns"] >= 0


def _square_hole():
    x = np.array([[3, 3], [4, 3], [5, 3], [3, 4], [5, 4], [3, 5], [4, 5], [5, 5]])
    return Hole(1, 1.0, (4, 4, 1, 1), (4.0, 4.0), x)


def test_node_on_boundary_is_member():
    rp = RasterParams(node_radius_px=1)
    lay = Layout(np.array([[3.0 - rp.margin, 3.0 - rp.margin], [40.0, 40.0]]), 50.0, 50.0)
    (h,) = map_nodes_to_holes(lay, [_square_hole()], 1, rp)
    assert h.node_ids == {0}


def test_adjacency_uses_chebyshev_distance():
    rp = RasterParams(node_radius_px=1)
    m = rp.margin
    # 3 px diagonally from (5, 5): Chebyshev 3 = delta 2 + radius 1
    lay = Layout(np.array([[8.0 - m, 8.0 - m], [9.0 - m, 5.0 - m]]), 50.0, 50.0)
    (h,) = map_nodes_to_holes(lay, [_square_hole()], 2, rp)
    assert h.node_ids == {0}
    (wide,) = map_nodes_to_holes(lay, [_square_hole()], 3, rp)
    assert wide.node_ids >= h.node_ids and wide.node_ids == {0, 1}


def test_polygon_ring_all_nodes_on_hole():
    n = 12
    ang = 2 * np.pi * np.arange(n) / n
    pos = 300 + 250 * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    topo = Topology(n, [(i, (i + 1) % n) for i in range(n)])
    lay = Layout(pos, 600.0, 600.0)
    rp = RasterParams()
    rep = detect_holes(render_binary(lay, topo, rp), DetectParams())
    assert rep.n_holes == 1
    (h,) = map_nodes_to_holes(lay, rep.holes, 2, rp)
    assert h.node_ids == set(range(n))


def test_pipeline_reproducible_and_methods_agree():
    topo, _ = generate_topology(GenSpec(200, 6, 1, seed=3))
    run = LayoutRun("kk", seed=2)
    a = run_pipeline(topo, run)
    b = run_pipeline(topo, run)
    assert [h.to_dict() for h in a.holes] == [h.to_dict() for h in b.holes]
    ct = run_pipeline(topo, run, detect_params=DetectParams("ct"))
    assert ct.n_holes == a.n_holes
    assert a.meta["layout"]["algorithm"] == "kk"


def test_carved_holes_are_found():
    topo, _ = generate_topology(GenSpec(500, 10, 2, 0.12, seed=1))
    assert run_pipeline(topo, LayoutRun("kk", seed=0)).n_holes >= 1


def test_overlay_colours_holes():
    img = _ring500()
    rep = detect_holes_ccl(img, _params(100))
    rgb = overlay(img, rep)
    assert rgb.shape == (SIZE, SIZE, 3)
    assert tuple(rgb[20, 20]) == (64, 96, 255)
    assert tuple(rgb[0, 0]) == (255, 255, 255)
    assert tuple(rgb[11, 14]) == (0, 0, 0)


@pytest.mark.parametrize("bad", [dict(area_threshold_fraction=0), dict(area_threshold_fraction=1.5),
                                 dict(method="sobel"), dict(connectivity=6), dict(node_adjacency_px=0)])
def test_params_validation(bad):
    with pytest.raises((ValueError, KeyError)):
        DetectParams(**bad)
