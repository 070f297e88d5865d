import math

import numpy as np
import pytest

from fdccl import (
    DegenerateLayoutError,
    DivergenceError,
    GenSpec,
    Layout,
    LayoutRun,
    Topology,
    canvas_side,
    fit_to_canvas,
    generate_topology,
    run_layout,
)
from fdccl.layout import (
    FA2Params,
    FRParams,
    JiggleParams,
    KKParams,
    fa2_forces,
    fr_forces,
    fr_step,
    iterate_layout,
    jiggle_forces,
    kk_energy,
    kk_forces,
    kk_step,
    read_layout,
    write_layout,
)

from conftest import fr_balance

PAIR = Topology(2, [(0, 1)])
ISOLATED = Topology(2, np.empty((0, 2), dtype=np.int64))


def _mag(v):
    return float(np.hypot(*v))


# ------------------------------------------------------------------ KK

def test_kk_zero_force_at_target_length():
    p = KKParams(stiffness=1, node_radius=0, unit_edge_length=1)
    pos = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert np.allclose(kk_forces(pos, PAIR, p), 0)
    assert np.array_equal(kk_step(pos, PAIR, p), pos)


def test_kk_stretched_pair_contracts_with_unit_force():
    p = KKParams(stiffness=1, node_radius=0, unit_edge_length=1)
    pos = np.array([[0.0, 0.0], [2.0, 0.0]])
    f = kk_forces(pos, PAIR, p)
    assert f[0] == pytest.approx([1.0, 0.0])
    assert f[1] == pytest.approx([-1.0, 0.0])


def test_kk_energy_non_increasing_for_small_step(rng):
    topo, _ = generate_topology(GenSpec(10, 3, seed=9))
    pos = rng.uniform(0, 5, (topo.node_count, 2))
    dt = 0.1
    base = KKParams(stiffness=1, node_radius=0, unit_edge_length=1, time_step=dt)
    e0 = kk_energy(pos, topo, base)
    while dt > 1e-6:
        p = KKParams(stiffness=1, node_radius=0, unit_edge_length=1, time_step=dt)
        if kk_energy(kk_step(pos, topo, p), topo, p) <= e0:
            break
        dt /= 2
    assert dt > 1e-6


C4 = Topology(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def _c4_final(seed):
    run = LayoutRun("kk", KKParams(1.0, 0.0, 0.1, 1.0), 2000, 1e-12, canvas_size=10.0, seed=seed)
    pos = None
    for _, pos, _ in iterate_layout(C4, run.resolved(4, 2)):
        pass
    return pos, run.resolved(4, 2).params


@pytest.mark.parametrize("seed", [0, 1, 2, 4, 5])
def test_kk_c4_edges_uniform(seed):
    pos, _ = _c4_final(seed)
    lengths = [np.hypot(*(pos[u] - pos[v])) for u, v in C4.edges]
    assert max(lengths) <= 1.1 * min(lengths)


def test_kk_c4_crossed_start_is_a_worse_local_minimum():
    # seed 3 starts from a self-intersecting quadrilateral and settles in a
    # bowtie; plain gradient steps cannot untangle it
    square, p = _c4_final(0)
    bowtie, _ = _c4_final(3)
    assert kk_energy(bowtie, C4, p) > kk_energy(square, C4, p)


# ----------------------------------------------------------------- FA2

def test_fa2_repulsion_between_isolated_nodes():
    p = FA2Params(k_rep=1, gravity=0)
    f = fa2_forces(np.array([[0.0, 0.0], [2.0, 0.0]]), ISOLATED, p)
    assert f[1] == pytest.approx([0.5, 0.0])
    assert f[0] == pytest.approx([-0.5, 0.0])


def test_fa2_attraction_equals_distance():
    # isolate the spring by making repulsion negligible
    p = FA2Params(k_rep=1e-12, gravity=0)
    f = fa2_forces(np.array([[0.0, 0.0], [3.0, 0.0]]), PAIR, p)
    assert _mag(f[0]) == pytest.approx(3.0)
    assert f[0][0] > 0


def test_fa2_gravity_scales_with_degree():
    star = Topology(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    pos = np.array([[0.0, 0.0], [50.0, 0.0], [-50.0, 0.0], [0.0, 50.0], [0.0, -50.0]])
    p = FA2Params(k_rep=1e-12, gravity=2)
    with_g = fa2_forces(pos, star, p, center=(10.0, 0.0))
    without = fa2_forces(pos, star, FA2Params(k_rep=1e-12, gravity=0), center=(10.0, 0.0))
    assert with_g[0] - without[0] == pytest.approx([10.0, 0.0])


# ------------------------------------------------------------------ FR

def test_fr_unit_repulsion_and_zero_log_attraction():
    f = fr_forces(np.array([[0.0, 0.0], [1.0, 0.0]]), ISOLATED, FRParams(k_r=1, k_a=5))
    assert _mag(f[0]) == pytest.approx(1.0)
    # attraction vanishes at unit distance, leaving only the repulsion
    g = fr_forces(np.array([[0.0, 0.0], [1.0, 0.0]]), PAIR, FRParams(k_r=1, k_a=5))
    assert np.allclose(f, g)


def test_fr_displacement_clamped_to_temperature():
    # huge repulsion at tiny distance: the step must be capped at T
    p = FRParams(k_r=1.0, k_a=1.0, initial_temperature=0.5)
    pos = np.array([[0.0, 0.0], [0.01, 0.0]])
    moved = fr_step(pos, ISOLATED, p, 0) - pos
    assert np.hypot(*moved.T) == pytest.approx([0.5, 0.5])


@pytest.mark.parametrize("k_r, k_a", [(1.0, 1.0), (8.0, 1.0), (1.0, 4.0)])
def test_fr_two_node_equilibrium(k_r, k_a):
    p = FRParams(k_r=k_r, k_a=k_a, initial_temperature=10.0, cooling_factor=0.95)
    pos = np.array([[0.0, 0.0], [5.0, 0.0]])
    for it in range(1000):
        pos = fr_step(pos, PAIR, p, it)
    assert np.hypot(*(pos[0] - pos[1])) == pytest.approx(fr_balance(k_r / k_a), abs=0.05)


def test_fr_unit_balance_value():
    assert fr_balance(1.0) == pytest.approx(1.5316, abs=1e-4)


# -------------------------------------------------------------- JIGGLE

def test_jiggle_rest_length_has_no_edge_force():
    p = JiggleParams(k_r=1e-15, k_a=1, k_s=1, edge_length=2.0)
    f = jiggle_forces(np.array([[0.0, 0.0], [2.0, 0.0]]), PAIR, p)
    assert np.allclose(f, 0, atol=1e-12)


def test_jiggle_spring_contracts():
    length = 3.0
    spring_only = JiggleParams(k_r=1e-15, k_a=1e-15, k_s=1, edge_length=length)
    f = jiggle_forces(np.array([[0.0, 0.0], [2 * length, 0.0]]), PAIR, spring_only)
    assert f[0] == pytest.approx([length, 0.0], abs=1e-9)


def test_jiggle_repulsion_inverse_square():
    p = JiggleParams(k_r=1, k_a=1, k_s=1, edge_length=1)
    near = jiggle_forces(np.array([[0.0, 0.0], [1.5, 0.0]]), ISOLATED, p)
    far = jiggle_forces(np.array([[0.0, 0.0], [3.0, 0.0]]), ISOLATED, p)
    assert _mag(far[0]) == pytest.approx(_mag(near[0]) / 4)


# ---------------------------------------------------------- engine, fit

@pytest.mark.parametrize("algo", ["kk", "fa2", "fr", "jiggle"])
def test_single_node_is_stationary(algo):
    t = Topology(1, np.empty((0, 2), dtype=np.int64))
    run = LayoutRun(algo, max_iterations=20, stability_epsilon=1e-12, canvas_size=10.0)
    # FA2 gravity pulls toward the canvas centre, so start there
    start = np.array([[5.0, 5.0]]) if algo == "fa2" else np.array([[1.0, 2.0]])
    steps = [p.copy() for _, p, _ in iterate_layout(t, run.resolved(1), start)]
    assert all(np.array_equal(s, start) for s in steps)


def test_fa2_single_node_drifts_to_centre():
    t = Topology(1, np.empty((0, 2), dtype=np.int64))
    run = LayoutRun("fa2", max_iterations=5, stability_epsilon=1e-12, canvas_size=10.0)
    *_, (_, last, _) = iterate_layout(t, run.resolved(1), np.array([[1.0, 5.0]]))
    assert 1.0 < last[0, 0] and last[0, 1] == 5.0


@pytest.mark.parametrize("algo", ["kk", "fa2", "fr", "jiggle"])
def test_layout_is_deterministic(algo):
    topo, _ = generate_topology(GenSpec(120, 6, seed=1))
    run = LayoutRun(algo, max_iterations=50, seed=4)
    a, b = run_layout(topo, run), run_layout(topo, run)
    assert a == b
    assert a.canvas_width == canvas_side(topo.node_count)
    assert a.positions.min() >= 0 and a.positions.max() <= a.canvas_width


@pytest.mark.parametrize("n, side", [(200, 800), (500, 2000), (1000, 4000), (2000, 8000),
                                     (3000, 12000), (20, 600), (150, 600)])
def test_canvas_side(n, side):
    assert canvas_side(n) == side


def test_fit_to_canvas_translates_and_scales():
    fitted = fit_to_canvas(np.array([[-1.0, -1.0], [1.0, 1.0]]), n_nodes=2)
    assert fitted.positions.tolist() == [[0.0, 0.0], [600.0, 600.0]]
    assert (fitted.canvas_width, fitted.canvas_height) == (600.0, 600.0)


def test_fit_to_canvas_keeps_aspect():
    fitted = fit_to_canvas(np.array([[0.0, 0.0], [4.0, 1.0], [2.0, 0.5]]))
    assert fitted.positions[1].tolist() == [600.0, 150.0]


def test_fit_to_canvas_degenerate():
    with pytest.raises(DegenerateLayoutError):
        fit_to_canvas(np.zeros((3, 2)))


def test_divergence_reports_iteration_and_node():
    c3 = Topology(3, [(0, 1), (1, 2)])
    run = LayoutRun("kk", KKParams(time_step=1e6), 50, 1e-12, canvas_size=10.0)
    with pytest.raises(DivergenceError) as exc:
        run_layout(c3, run)
    assert exc.value.iteration >= 0 and 0 <= exc.value.node < 3


def test_run_layout_rejects_disconnected():
    with pytest.raises(ValueError):
        run_layout(ISOLATED, LayoutRun("fr"))


def test_layout_io_round_trip(tmp_path):
    lay = Layout(np.array([[0.1, 2.0], [math.pi, 7.25]]), 600.0, 600.0, {"algorithm": "kk"})
    write_layout(lay, tmp_path / "l.csv", tmp_path / "l.json")
    back = read_layout(tmp_path / "l.csv", tmp_path / "l.json")
    assert back == lay and back.meta["algorithm"] == "kk"


@pytest.mark.parametrize("bad", [dict(max_iterations=0), dict(stability_epsilon=0),
                                 dict(canvas_size=-1)])
def test_layout_run_validation(bad):
    with pytest.raises(ValueError):
        LayoutRun("kk", **bad)
    with pytest.raises(ValueError, match="expected one of"):
        LayoutRun("bogus")
