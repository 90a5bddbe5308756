import csv
import io
import itertools
import json

import networkx as nx
import numpy as np
import pytest

from qwgi import generators as gen
from qwgi.cli import main
from qwgi.graph import Graph, Permutation, apply_permutation, write_edge_list, write_graph6
from qwgi.harness import REPORT_KEYS, RunConfig, run_batch

from oracles import to_nx


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def g6file(tmp_path, name, graphs):
    path = tmp_path / name
    path.write_text("".join(write_graph6(g) + "\n" for g in graphs))
    return str(path)


@pytest.fixture
def srg_files(tmp_path):
    return g6file(tmp_path, "rook.g6", [gen.rook_graph(4)]), g6file(tmp_path, "shrikhande.g6", [gen.shrikhande()])


class TestCompare:
    def test_same_graph(self, tmp_path):
        f = g6file(tmp_path, "p.g6", [gen.petersen()])
        code, text = run(["compare", f, f, "--jobs", "1"])
        doc = json.loads(text)
        assert code == 0 and doc["verdict"] == "NotDistinguished"
        assert tuple(doc) == REPORT_KEYS
        assert doc["cross_matches"] == doc["certificate_a"] == doc["self_matches_b"]

    def test_srg_pair(self, srg_files):
        code, text = run(["compare", *srg_files, "--no-timing"])
        doc = json.loads(text)
        assert code == 1 and doc["verdict"] == "NonIsomorphic"
        assert doc["certificate_a"] != doc["certificate_b"]
        assert doc["n"] == 16 and doc["k"] == 48 and doc["steps"] == 32 and doc["scheme"] == "full"

    def test_deterministic_without_timing(self, srg_files):
        a = run(["compare", *srg_files, "--no-timing", "--jobs", "1"])
        b = run(["compare", *srg_files, "--no-timing", "--jobs", "3"])
        assert a == b and json.loads(a[1])["elapsed_ms"] is None

    def test_order_mismatch_reports_both(self, tmp_path):
        a = g6file(tmp_path, "a.g6", [gen.cycle(4)])
        b = g6file(tmp_path, "b.g6", [gen.cycle(5)])
        code, text = run(["compare", a, b])
        assert code == 1 and json.loads(text)["n"] == [4, 5]

    def test_csv(self, srg_files):
        code, text = run(["compare", *srg_files, "--output", "csv", "--no-timing"])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert code == 1 and len(rows) == 1 and tuple(rows[0]) == REPORT_KEYS

    def test_edge_list_input(self, tmp_path):
        a = tmp_path / "a.txt"
        a.write_text(write_edge_list(gen.cycle(6)))
        b = tmp_path / "b.txt"
        b.write_text(write_edge_list(gen.disjoint_union(gen.cycle(3), gen.cycle(3))))
        code, _ = run(["compare", str(a), str(b), "--format", "edgelist"])
        assert code == 1

    def test_simple_pi_and_flags(self, srg_files):
        code, text = run(["compare", *srg_files, "--scheme", "simple-pi", "--steps", "10", "--strict", "--no-diagonal"])
        doc = json.loads(text)
        assert code == 1 and doc["scheme"] == "simple-pi" and doc["steps"] == 10 and doc["strict_mode"]

    @pytest.mark.parametrize("argv", [
        ["compare", "/nonexistent/a.g6", "/nonexistent/b.g6"],
        ["compare", "x", "y", "--steps", "0"],
        ["compare", "x", "y", "--scheme", "bogus"],
    ])
    def test_errors(self, argv):
        assert run(argv)[0] == 2

    def test_empty_file(self, tmp_path):
        f = tmp_path / "empty.g6"
        f.write_text("")
        assert run(["compare", str(f), str(f)])[0] == 2

    def test_malformed_graph(self, tmp_path):
        f = tmp_path / "bad.g6"
        f.write_text("A_x\n")
        assert run(["compare", str(f), str(f)])[0] == 2

    def test_equal_angles_rejected(self, srg_files):
        assert run(["compare", *srg_files, "--phi-node", "0.3", "--phi-cut10", "0.3"])[0] == 2

    def test_figures(self, srg_files, tmp_path):
        out = tmp_path / "figs"
        code, _ = run(["compare", *srg_files, "--plot-dir", str(out)])
        assert code == 1
        for name in ("comparison_rows.png", "traces.png"):
            assert (out / name).stat().st_size > 1000

    def test_environment_overrides(self, srg_files, monkeypatch):
        monkeypatch.setenv("QWGI_SCHEME", "simple-pi")
        monkeypatch.setenv("QWGI_STEPS", "12")
        monkeypatch.setenv("QWGI_NO_TIMING", "1")
        doc = json.loads(run(["compare", *srg_files])[1])
        assert doc["scheme"] == "simple-pi" and doc["steps"] == 12 and doc["elapsed_ms"] is None
        doc = json.loads(run(["compare", *srg_files, "--scheme", "full"])[1])
        assert doc["scheme"] == "full"


class TestCertify:
    def test_lines_and_errors(self, tmp_path):
        rng = np.random.default_rng(0)
        g = gen.random_graph(8, 0.4, rng, min_edges=1)
        h = apply_permutation(g, Permutation.random(8, rng))
        path = tmp_path / "c.g6"
        path.write_text(f"{write_graph6(g)}\nnot-a-graph\n\n{write_graph6(h)}\n{write_graph6(gen.empty(3))}\n")
        code, text = run(["certify", str(path)])
        rows = json.loads(text)
        assert code == 0 and [r["line"] for r in rows] == [1, 2, 4, 5]
        assert rows[1]["error"] and rows[1]["certificate"] is None
        assert rows[0]["certificate"] == rows[2]["certificate"] > 0
        assert rows[0]["collides_with"] == [4] and rows[2]["collides_with"] == [1]
        assert rows[3]["certificate"] == 0

    def test_csv_and_figure(self, tmp_path):
        f = g6file(tmp_path, "c.g6", [gen.cycle(5), gen.petersen()])
        code, text = run(["certify", f, "--output", "csv", "--plot-dir", str(tmp_path)])
        assert code == 0 and len(list(csv.DictReader(io.StringIO(text)))) == 2
        assert (tmp_path / "certificates.png").exists()


def exhaustive(records, cfg):
    from qwgi.algorithm import compare_graphs

    out = set()
    graphs = [(r.line, r.graph) for r in records if r.graph is not None]
    for (la, a), (lb, b) in itertools.combinations(graphs, 2):
        r = compare_graphs(a, b, cfg.phase_scheme(), cfg.steps, cfg.tol, cfg.strict)
        if r.verdict.value == "NotDistinguished":
            out.add((la, lb))
    return out


class TestBatch:
    def test_trees(self, tmp_path):
        trees = [Graph.from_edges(10, t.edges()) for t in nx.nonisomorphic_trees(10)]
        f = g6file(tmp_path, "trees.g6", trees)
        code, text = run(["batch", f, "--no-timing"])
        doc = json.loads(text)
        assert code == 0
        assert doc["counts"]["graphs"] == len(trees) == 106
        assert doc["counts"]["NotDistinguished"] == 0
        assert doc["counts"]["pairs"] == 106 * 105 // 2

    def test_permutations_form_one_group(self, tmp_path):
        rng = np.random.default_rng(5)
        g = gen.random_graph(9, 0.4, rng, min_edges=1)
        others = [apply_permutation(g, Permutation.random(9, rng)) for _ in range(2)]
        f = g6file(tmp_path, "g.g6", [g, *others, gen.petersen()])
        doc = json.loads(run(["batch", f, "--no-timing"])[1])
        assert doc["collision_groups"] == [[1, 2, 3]]
        assert doc["counts"]["NotDistinguished"] == 3
        assert all(c["verdict"] == "NotDistinguished" for c in doc["comparisons"])

    def test_mixed_orders_warn(self, tmp_path):
        f = g6file(tmp_path, "m.g6", [gen.cycle(4), gen.cycle(5)])
        doc = json.loads(run(["batch", f])[1])
        assert any("mixed graph orders" in w for w in doc["warnings"])
        assert doc["counts"]["NonIsomorphic"] == 1

    def test_matches_exhaustive_comparison(self, tmp_path):
        rng = np.random.default_rng(17)
        graphs = []
        for _ in range(30):
            graphs.append(gen.random_graph(7, rng.uniform(0.2, 0.6), rng, min_edges=1))
        # some relabeled duplicates so groups are non-trivial
        graphs += [apply_permutation(graphs[i], Permutation.random(7, rng)) for i in range(0, 30, 3)]
        f = g6file(tmp_path, "r.g6", graphs)
        cfg = RunConfig()
        report = run_batch(f, cfg)
        assert set(report.not_distinguished) == exhaustive(report.records, cfg)

    def test_independent_of_jobs(self, tmp_path):
        rng = np.random.default_rng(2)
        graphs = [gen.random_regular(10, 3, rng) for _ in range(8)]
        f = g6file(tmp_path, "j.g6", graphs)
        a = run(["batch", f, "--no-timing", "--jobs", "1"])
        b = run(["batch", f, "--no-timing", "--jobs", "4"])
        assert a == b

    def test_csv(self, tmp_path):
        g = gen.cycle(6)
        f = g6file(tmp_path, "c.g6", [g, g])
        code, text = run(["batch", f, "--output", "csv"])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert code == 0 and rows[0]["verdict"] == "NotDistinguished"


class TestFindIso:
    def test_isomorphic(self, tmp_path):
        g = gen.cycle(6)
        h = apply_permutation(g, Permutation.random(6, np.random.default_rng(0)))
        code, text = run(["find-iso", g6file(tmp_path, "a.g6", [g]), g6file(tmp_path, "b.g6", [h])])
        doc = json.loads(text)
        assert code == 0 and doc["outcome"] == "Isomorphic" and doc["verified"]
        m = doc["mapping"]
        assert nx.utils.graphs_equal(nx.relabel_nodes(to_nx(g), dict(enumerate(m))), to_nx(h))

    def test_non_isomorphic(self, tmp_path):
        a = g6file(tmp_path, "a.g6", [gen.cycle(6)])
        b = g6file(tmp_path, "b.g6", [gen.disjoint_union(gen.cycle(3), gen.cycle(3))])
        assert run(["find-iso", a, b])[0] == 1


class TestQmeasureDemo:
    def test_csv(self):
        code, text = run(["qmeasure-demo", "--p", "100", "--m-max", "200"])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert code == 0 and len(rows) == 201
        r = rows[100]
        assert round(float(r["exact"]), 4) == 0.6340 and round(float(r["approx"]), 4) == 0.6321

    def test_monte_carlo_columns(self, tmp_path):
        code, text = run(["qmeasure-demo", "--n", "5", "--c", "2", "--trials", "500", "--plot-dir", str(tmp_path)])
        rows = list(csv.DictReader(io.StringIO(text)))
        sampled = [r for r in rows if r["monte_carlo"]]
        assert code == 0 and len(rows) == 251 and len(sampled) == 11
        for r in sampled:
            assert abs(float(r["monte_carlo"]) - float(r["exact"])) <= 5 * float(r["mc_sigma"]) + 1e-12
        assert (tmp_path / "detection_curves.png").exists()

    def test_target_error(self, capsys):
        code, _ = run(["qmeasure-demo", "--p", "20", "--m-max", "5", "--target-error", "0.001"])
        assert code == 0 and "135" in capsys.readouterr().err

    def test_bad_p(self):
        assert run(["qmeasure-demo", "--p", "0.5"])[0] == 2
