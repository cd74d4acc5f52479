import csv
import json

import pytest

from geer.cli import BENCH_COLUMNS, main, read_groundtruth, read_queries
from geer.generators import complete_graph, cycle_graph, toy_graph
from geer.graph import write_edge_list
from geer.spectral import load_meta


def write_graph(g, path):
    with open(path, "w") as fh:
        write_edge_list(g, fh)
    return str(path)


@pytest.fixture
def k3_files(tmp_path):
    graph = write_graph(complete_graph(3), tmp_path / "k3.txt")
    meta = str(tmp_path / "k3.meta.json")
    assert main(["preprocess", "--graph", graph, "--out", meta]) == 0
    return graph, meta


def query_json(capsys, *argv):
    code = main(["query", *argv])
    return code, capsys.readouterr()


class TestPreprocess:
    def test_k3(self, k3_files):
        assert load_meta(k3_files[1]).lam_raw == pytest.approx(0.5, abs=1e-7)

    def test_default_out_path(self, tmp_path):
        graph = write_graph(complete_graph(4), tmp_path / "k4.txt")
        assert main(["preprocess", "--graph", graph]) == 0
        assert (tmp_path / "k4.txt.meta.json").exists()

    def test_four_cycle(self, tmp_path, capsys):
        graph = write_graph(cycle_graph(4), tmp_path / "c4.txt")
        assert main(["preprocess", "--graph", graph]) == 2
        assert "graph is bipartite" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["preprocess", "--graph", str(tmp_path / "nope.txt")]) == 1

    def test_malformed(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("0 1\n1 two\n")
        assert main(["preprocess", "--graph", str(path)]) == 1
        assert "line 2" in capsys.readouterr().err


class TestGenQueries:
    def test_k3_edges(self, k3_files, tmp_path):
        out = tmp_path / "q.tsv"
        assert main(["gen-queries", "--graph", k3_files[0], "--kind", "edges", "--count", "3",
                     "--out", str(out)]) == 0
        assert {frozenset(p) for p in read_queries(out)} == {
            frozenset(p) for p in [(0, 1), (1, 2), (0, 2)]
        }

    def test_same_seed_same_file(self, tmp_path):
        graph = write_graph(toy_graph(), tmp_path / "toy.txt")
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        for out in (a, b):
            main(["gen-queries", "--graph", graph, "--count", "20", "--seed", "4", "--out", str(out)])
        assert a.read_bytes() == b.read_bytes()

    def test_toy_random_pairs(self, tmp_path):
        graph = write_graph(toy_graph(), tmp_path / "toy.txt")
        out = tmp_path / "q.tsv"
        with pytest.warns(UserWarning, match="55 distinct pairs"):
            assert main(["gen-queries", "--graph", graph, "--count", "100", "--out", str(out)]) == 0
        pairs = read_queries(out)
        assert len(pairs) == 100
        assert all(s != t for s, t in pairs)

    def test_too_many_pairs_warns(self, k3_files, tmp_path):
        out = tmp_path / "q.tsv"
        with pytest.warns(UserWarning):
            main(["gen-queries", "--graph", k3_files[0], "--count", "5", "--out", str(out)])
        assert len(read_queries(out)) == 5

    def test_bad_count(self, k3_files):
        assert main(["gen-queries", "--graph", k3_files[0], "--count", "0"]) == 1


class TestGroundtruth:
    def test_k3_edges(self, k3_files, tmp_path):
        queries = tmp_path / "q.tsv"
        queries.write_text("0\t1\n2\t2\n")
        out = tmp_path / "gt.tsv"
        assert main(["groundtruth", "--graph", k3_files[0], "--queries", str(queries),
                     "--out", str(out)]) == 0
        truth = read_groundtruth(out)
        assert truth[(0, 1)] == pytest.approx(2 / 3, abs=1e-9)
        assert truth[(2, 2)] == 0.0

    def test_smm_path_on_k3(self, k3_files, tmp_path):
        queries = tmp_path / "q.tsv"
        queries.write_text("0\t1\n1\t1\n")
        out = tmp_path / "gt.tsv"
        assert main(["groundtruth", "--graph", k3_files[0], "--meta", k3_files[1],
                     "--queries", str(queries), "--exact-cap", "0", "--out", str(out)]) == 0
        truth = read_groundtruth(out)
        assert truth[(0, 1)] == pytest.approx(2 / 3, abs=1e-9)
        assert truth[(1, 1)] == 0.0
        rows = list(csv.DictReader(open(out), delimiter="\t"))
        assert rows[0]["source"] == "smm1000"
        assert float(rows[0]["tail_bound"]) < 1e-9

    def test_toy_matches_exact(self, tmp_path):
        from geer.estimators import exact_er
        from geer.generators import TOY_S, TOY_T

        g = toy_graph()
        graph = write_graph(g, tmp_path / "toy.txt")
        queries = tmp_path / "q.tsv"
        queries.write_text(f"{TOY_S}\t{TOY_T}\n3\t9\n")
        out = tmp_path / "gt.tsv"
        assert main(["groundtruth", "--graph", graph, "--queries", str(queries),
                     "--out", str(out)]) == 0
        truth = read_groundtruth(out)
        assert truth[(TOY_S, TOY_T)] == pytest.approx(exact_er(g, TOY_S, TOY_T), abs=1e-6)
        assert truth[(3, 9)] == pytest.approx(exact_er(g, 3, 9), abs=1e-6)


class TestQuery:
    def test_exact(self, k3_files, capsys):
        code, out = query_json(capsys, "--graph", k3_files[0], "--meta", k3_files[1],
                               "--method", "exact", "--source", "0", "--target", "1")
        assert code == 0
        record = json.loads(out.out)
        assert record["value"] == pytest.approx(0.6666666667, abs=1e-10)
        assert record["method"] == "EXACT"

    def test_geer_same_node(self, k3_files, capsys):
        code, out = query_json(capsys, "--graph", k3_files[0], "--meta", k3_files[1],
                               "--method", "geer", "--source", "2", "--target", "2")
        record = json.loads(out.out)
        assert code == 0 and record["value"] == 0.0 and record["walks_used"] == 0

    def test_unknown_label(self, k3_files, capsys):
        code, _ = query_json(capsys, "--graph", k3_files[0], "--meta", k3_files[1],
                             "--method", "geer", "--source", "0", "--target", "17")
        assert code == 3

    def test_mc2_non_edge(self, tmp_path, capsys):
        from geer.generators import two_triangles

        graph = write_graph(two_triangles(), tmp_path / "tt.txt")
        code, out = query_json(capsys, "--graph", graph, "--method", "mc2",
                               "--source", "0", "--target", "5")
        assert code == 4 and "edge" in out.err

    def test_meta_mismatch(self, k3_files, tmp_path, capsys):
        graph = write_graph(complete_graph(5), tmp_path / "k5.txt")
        code, _ = query_json(capsys, "--graph", graph, "--meta", k3_files[1],
                             "--method", "geer", "--source", "0", "--target", "1")
        assert code == 1

    def test_seeded_repeatable(self, k3_files, capsys):
        argv = ["--graph", k3_files[0], "--meta", k3_files[1], "--method", "amc",
                "--source", "0", "--target", "1", "--eps", "0.05", "--seed", "3"]
        values = [json.loads(query_json(capsys, *argv)[1].out)["value"] for _ in range(2)]
        assert values[0] == values[1]


class TestBench:
    def run_bench(self, k3_files, tmp_path, *extra):
        queries = tmp_path / "q.tsv"
        queries.write_text("# edges\n0\t1\n1\t2\n")
        gt = tmp_path / "gt.tsv"
        main(["groundtruth", "--graph", k3_files[0], "--queries", str(queries), "--out", str(gt)])
        out = tmp_path / "bench.csv"
        code = main(["bench", "--graph", k3_files[0], "--meta", k3_files[1],
                     "--queries", str(queries), "--groundtruth", str(gt),
                     "--out", str(out), *extra])
        return code, out

    def test_k3_records(self, k3_files, tmp_path, capsys):
        code, out = self.run_bench(k3_files, tmp_path, "--methods", "exact,smm,geer",
                                   "--eps-list", "0.5", "--iters", "1000")
        assert code == 0
        with open(out) as fh:
            assert fh.readline().strip() == ",".join(BENCH_COLUMNS)
        rows = list(csv.DictReader(open(out)))
        assert len(rows) == 3 * 2
        for row in rows:
            assert row["status"] == "ok"
            limit = 0.5 if row["method"] == "GEER" else 1e-6
            assert float(row["abs_error"]) <= limit
        assert "GEER" in capsys.readouterr().err

    def test_refined_smm_within_half_eps(self, k3_files, tmp_path):
        _, out = self.run_bench(k3_files, tmp_path, "--methods", "smm", "--eps-list", "0.5,0.1")
        for row in csv.DictReader(open(out)):
            assert float(row["abs_error"]) <= float(row["epsilon"]) / 2

    def test_empty_methods(self, k3_files, tmp_path):
        code, _ = self.run_bench(k3_files, tmp_path, "--methods", "")
        assert code == 1

    def test_rerun_identical_values(self, k3_files, tmp_path):
        columns = []
        for run in range(2):
            _, out = self.run_bench(k3_files, tmp_path, "--methods", "amc,geer,mc",
                                    "--eps-list", "0.2,0.1", "--seed", "8")
            columns.append([r["value"] for r in csv.DictReader(open(out))])
        assert columns[0] == columns[1]

    def test_timeout_recorded(self, k3_files, tmp_path):
        _, out = self.run_bench(k3_files, tmp_path, "--methods", "tp", "--eps-list", "0.01",
                                "--timeout-ms", "1")
        rows = list(csv.DictReader(open(out)))
        assert [r["status"] for r in rows] == ["timeout", "timeout"]
        assert all(r["value"] == "" for r in rows)
