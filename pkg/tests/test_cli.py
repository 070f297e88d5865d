import csv
import json

import pytest

from fdccl import __version__, read_edge_list
from fdccl.cli import main


def run(*argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run("gen", "--nodes", 200, "--degree", 6, "--holes", 2, "--seed", 7, "--out", d / "g") == 0
    assert run("layout", "--edges", d / "g/edges.txt", "--algo", "kk", "--seed", 1,
               "--iterations", 300, "--out", d / "l.csv") == 0
    return d


def test_gen_outputs(work):
    assert sorted(p.name for p in (work / "g").iterdir()) == ["edges.txt", "ground_truth.csv", "holes.json"]
    cfg = json.loads((work / "g/holes.json").read_text())["config"]
    assert cfg["nodes"] == 200 and cfg["seed"] == 7 and cfg["version"] == __version__
    assert read_edge_list(work / "g/edges.txt").node_count <= 200


def test_gen_is_byte_identical(work, tmp_path):
    assert run("gen", "--nodes", 200, "--degree", 6, "--holes", 2, "--seed", 7, "--out", tmp_path) == 0
    for name in ("edges.txt", "ground_truth.csv"):
        assert (tmp_path / name).read_bytes() == (work / "g" / name).read_bytes()


@pytest.mark.parametrize("argv", [
    ["gen", "--nodes", 1, "--degree", 6],
    ["gen", "--degree", 6],
    ["layout", "--edges", "e.txt", "--algo", "bogus"],
    ["layout", "--edges", "e.txt", "--algo", "kk", "--iterations", 0],
    ["bench", "--reps", 1],
    ["detect", "--layout", "l.csv", "--edges", "e.txt", "--alpha", 2],
    ["detect", "--layout", "l.csv", "--edges", "e.txt", "--method", "sobel"],
    ["eval", "--matrix", "huge"],
])
def test_usage_errors_exit_2(argv, tmp_path):
    assert run(*argv, "--out", tmp_path / "o") == 2
    assert not (tmp_path / "o").exists()


def test_unknown_algorithm_lists_names(capsys):
    run("layout", "--edges", "e.txt", "--algo", "bogus")
    assert "kk, fa2, fr, jiggle" in capsys.readouterr().err


def test_runtime_error_exit_1(tmp_path):
    assert run("layout", "--edges", tmp_path / "missing.txt", "--algo", "kk", "--out", tmp_path / "l.csv") == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("# nodes=2\n0 9\n")
    assert run("layout", "--edges", bad, "--algo", "kk", "--out", tmp_path / "l.csv") == 1


def test_layout_outputs(work):
    side = json.loads((work / "l.json").read_text())
    assert side["config"]["algo"] == "kk" and side["config"]["seed"] == 1
    rows = list(csv.reader(open(work / "l.csv")))
    assert rows[0] == ["id", "x", "y"]


def test_render(work):
    out = work / "r"
    assert run("render", "--layout", work / "l.csv", "--edges", work / "g/edges.txt", "--png", "--out", out) == 0
    assert {p.name for p in out.iterdir()} == {"render.pgm", "binary.pgm", "render.png", "render.json"}


def test_detect_methods_agree(work):
    counts = {}
    for method in ("ccl", "ct"):
        out = work / f"d_{method}"
        assert run("detect", "--layout", work / "l.csv", "--edges", work / "g/edges.txt",
                   "--method", method, "--alpha", 0.001, "--overlay", "--out", out) == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["config"]["method"] == method
        assert (out / "reference.pgm").exists() and (out / "overlay.png").exists()
        counts[method] = len(rep["holes"])
    assert counts["ccl"] == counts["ct"]
    out = work / "d_big"
    assert run("detect", "--layout", work / "l.csv", "--edges", work / "g/edges.txt",
               "--alpha", 0.9, "--out", out) == 0
    assert json.loads((out / "report.json").read_text())["holes"] == []


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# a comment\nnodes = 150\ndegree = 6\nhole-radius = 0.1\n")
    assert run("gen", "--config", cfg, "--nodes", 120, "--out", tmp_path / "g") == 0
    stored = json.loads((tmp_path / "g/holes.json").read_text())["config"]
    assert stored["nodes"] == 120 and stored["hole_radius"] == 0.1
    cfg.write_text("colour = blue\n")
    assert run("gen", "--config", cfg, "--nodes", 10, "--degree", 2, "--out", tmp_path / "h") == 2


def test_eval_small_matrix(tmp_path):
    out = tmp_path / "e"
    assert run("eval", "--nodes", 200, "--degrees", 6, "--algos", "kk,fr", "--classes", "sparse",
               "--seeds", 0, "--iterations", 50, "--out", out) == 0
    rows = list(csv.DictReader(open(out / "matrix.csv")))
    assert len(rows) == 2 and {r["algorithm"] for r in rows} == {"kk", "fr"}
    assert (out / "matrix_sparse.csv").exists()
    doc = json.loads((out / "reports.json").read_text())
    assert doc["config"]["iterations"] == 50


def test_default_matrix_dimensions():
    from fdccl.cli import MATRICES

    m = MATRICES["default"]
    assert len(m["nodes"]) * len(m["degrees"]) * len(m["algos"]) == 100


def test_bench_corpus_round_trip(tmp_path):
    gen = tmp_path / "b1"
    assert run("bench", "--nodes", 200, "--degrees", 6, "--algos", "kk", "--iterations", 50,
               "--reps", 5, "--save-corpus", "--out", gen) == 0
    out = tmp_path / "b2"
    assert run("bench", "--corpus", gen / "corpus", "--reps", 10, "--out", out) == 0
    rows = list(csv.DictReader(open(out / "bench.csv")))
    assert {r["method"] for r in rows} == {"ccl", "ct"}
    assert all(r["samples"] == "10" for r in rows)
    assert json.loads((out / "bench.json").read_text())["config"]["reps"] == 10


def test_version(capsys):
    assert run("--version") == 0
    assert __version__ in capsys.readouterr().out
