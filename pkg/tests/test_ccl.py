import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fdccl import Connectivity, ccl_two_pass, component_stats

from conftest import flood_fill_labels, partition


def test_empty_image():
    labels, stats = ccl_two_pass(np.zeros((5, 7), np.uint8))
    assert stats == [] and not labels.any()


def test_diagonal_pair():
    img = np.array([[1, 0], [0, 1]], np.uint8)
    _, four = ccl_two_pass(img, Connectivity.FOUR)
    _, eight = ccl_two_pass(img, Connectivity.EIGHT)
    assert [s.area for s in four] == [1, 1]
    assert [s.area for s in eight] == [2]


def test_u_shape_merges():
    img = np.zeros((6, 5), np.uint8)
    img[0:5, 0] = 1
    img[0:5, 4] = 1
    img[5, :] = 1
    labels, stats = ccl_two_pass(img, "4")
    assert len(stats) == 1 and stats[0].area == int(img.sum())
    assert partition(labels) == partition(flood_fill_labels(img, 4)[0])


def test_single_pixel_stats():
    img = np.zeros((10, 10), np.uint8)
    img[4, 3] = 1
    (s,) = ccl_two_pass(img)[1]
    assert (s.area, s.bbox, s.centroid, s.touches_border) == (1, (3, 4, 1, 1), (3.0, 4.0), False)


def test_rectangle_touching_border():
    img = np.zeros((10, 10), np.uint8)
    img[0:2, 0:3] = 1
    (s,) = ccl_two_pass(img)[1]
    assert (s.area, s.bbox, s.touches_border) == (6, (0, 0, 3, 2), True)


def test_labels_follow_raster_order():
    img = np.array([[0, 0, 1],
                    [1, 0, 0],
                    [0, 0, 1]], np.uint8)
    labels, _ = ccl_two_pass(img, 4)
    assert labels.tolist() == [[0, 0, 1], [2, 0, 0], [0, 0, 3]]


def test_deterministic(rng):
    img = (rng.random((64, 64)) < 0.5).astype(np.uint8)
    a, sa = ccl_two_pass(img)
    b, sb = ccl_two_pass(img)
    assert np.array_equal(a, b) and sa == sb


def test_areas_match_oracle(rng):
    img = (rng.random((32, 32)) < 0.55).astype(np.uint8)
    _, stats = ccl_two_pass(img)
    ref, k = flood_fill_labels(img, 8)
    assert sorted(s.area for s in stats) == sorted(np.bincount(ref.ravel())[1:].tolist())


@pytest.mark.parametrize("conn", [4, 8])
def test_label_map_equals_oracle_numbering(rng, conn):
    # numbering is dense in raster order of first pixel, like the oracle
    for _ in range(50):
        h, w = rng.integers(1, 40, 2)
        img = (rng.random((h, w)) < rng.uniform(0.1, 0.9)).astype(np.uint8)
        labels, _ = ccl_two_pass(img, conn)
        ref, _ = flood_fill_labels(img, conn)
        assert np.array_equal(labels, ref)


@settings(max_examples=150, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 24), st.integers(1, 24)), elements=st.integers(0, 1)),
       st.sampled_from([4, 8]))
def test_partition_property(img, conn):
    labels, stats = ccl_two_pass(img, conn)
    ref, k = flood_fill_labels(img, conn)
    assert partition(labels) == partition(ref)
    assert len(stats) == k
    for s in stats:
        ys, xs = np.nonzero(labels == s.label)
        assert s.area == len(xs)
        assert s.bbox == (xs.min(), ys.min(), xs.max() - xs.min() + 1, ys.max() - ys.min() + 1)
        assert s.centroid == pytest.approx((xs.mean(), ys.mean()))


def test_component_stats_from_label_map(rng):
    img = (rng.random((30, 30)) < 0.4).astype(np.uint8)
    labels, stats = ccl_two_pass(img)
    assert component_stats(labels) == stats
    with pytest.raises(ValueError):
        component_stats(np.array([[0, 2]]))


def test_rejects_non_binary():
    with pytest.raises(ValueError):
        ccl_two_pass(np.array([[0, 2]], np.uint8))
