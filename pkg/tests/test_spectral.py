import io
import json

import numpy as np
import pytest

from geer.errors import (
    GraphTooLargeError,
    MetaFormatError,
    MetaMismatchError,
    NonConvergenceError,
    SpectralDegeneracyError,
)
from geer.generators import complete_graph, cycle_graph, path_graph, petersen_graph
from geer.graph import parse_edge_list, stationary
from geer.spectral import (
    LAMBDA_CAP,
    dense_eigensystem,
    deflated_operator,
    estimate_lambda,
    principal_vector,
    read_meta,
    write_meta,
)
from oracles import dense_walk_matrix


def reference_lambda(g) -> float:
    vals = np.sort(np.linalg.eigvals(dense_walk_matrix(g)).real)
    return max(abs(vals[-2]), abs(vals[0]))


class TestEstimateLambda:
    def test_triangle(self, k3):
        meta = estimate_lambda(k3)
        assert meta.lam_raw == pytest.approx(0.5, abs=1e-7)

    def test_petersen(self):
        assert estimate_lambda(petersen_graph()).lam_raw == pytest.approx(2 / 3, abs=1e-7)

    def test_four_cycle_refused(self):
        with pytest.raises(SpectralDegeneracyError, match="bipartite"):
            estimate_lambda(cycle_graph(4))

    def test_disconnected_refused(self):
        with pytest.raises(SpectralDegeneracyError, match="disconnected"):
            estimate_lambda(parse_edge_list("0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n"))

    def test_margin_and_cap(self, k3):
        meta = estimate_lambda(k3)
        assert meta.lam == pytest.approx(meta.lam_raw * 1.001)
        assert 0 <= meta.lam_raw <= meta.lam < 1
        capped = estimate_lambda(k3, margin=10.0)
        assert capped.lam == LAMBDA_CAP

    def test_non_convergence_keeps_iterate(self):
        g = cycle_graph(41)
        with pytest.raises(NonConvergenceError) as exc:
            estimate_lambda(g, tol=1e-14, max_iter=5)
        assert exc.value.iterations == 5
        assert exc.value.vector.shape == (g.n,)
        assert 0 < exc.value.estimate < 1

    def test_corpus_against_dense(self, corpus):
        for g in corpus:
            expected = dense_eigensystem(g).lam
            assert estimate_lambda(g).lam_raw == pytest.approx(expected, abs=1e-6)
            assert expected == pytest.approx(reference_lambda(g), abs=1e-9)

    def test_deflation_rayleigh(self, corpus):
        for g in corpus[:10]:
            u1 = principal_vector(g)
            assert abs(u1 @ deflated_operator(g)(u1)) <= 1e-10


class TestDenseEigensystem:
    def test_triangle(self, k3):
        np.testing.assert_allclose(dense_eigensystem(k3).values, [1.0, -0.5, -0.5], atol=1e-12)

    def test_invariants(self, corpus):
        for g in corpus[:10]:
            es = dense_eigensystem(g)
            pi = stationary(g)
            assert es.values[0] == pytest.approx(1.0, abs=1e-9)
            assert np.all(np.abs(es.values) <= 1 + 1e-9)
            np.testing.assert_allclose(es.vectors[:, 0], 1.0, atol=1e-9)
            gram = (es.vectors * pi[:, None]).T @ es.vectors
            np.testing.assert_allclose(gram, np.eye(g.n), atol=1e-8)

    def test_inverse_stationary(self, corpus):
        for g in corpus[:10]:
            es = dense_eigensystem(g)
            np.testing.assert_allclose((es.vectors**2).sum(axis=1), 1 / es.pi, rtol=1e-8)

    def test_third_power_matches_iteration(self, corpus):
        for g in corpus[:10]:
            P = dense_walk_matrix(g)
            np.testing.assert_allclose(
                dense_eigensystem(g).walk_matrix_power(3), P @ P @ P, atol=1e-8
            )

    def test_cap(self):
        with pytest.raises(GraphTooLargeError):
            dense_eigensystem(path_graph(20), cap=10)


class TestMetaIO:
    def test_round_trip(self, k3):
        meta = estimate_lambda(k3)
        buf = io.StringIO()
        write_meta(meta, buf)
        buf.seek(0)
        assert read_meta(buf) == meta

    def test_missing_lambda(self, k3):
        doc = json.loads(_dump(estimate_lambda(k3)))
        del doc["lambda"]
        with pytest.raises(MetaFormatError, match="lambda"):
            read_meta(io.StringIO(json.dumps(doc)))

    def test_not_json(self):
        with pytest.raises(MetaFormatError):
            read_meta(io.StringIO("{lambda: 0.5"))

    def test_stale_meta_detected(self, k3):
        meta = estimate_lambda(k3)
        with pytest.raises(MetaMismatchError):
            meta.check_graph(complete_graph(4))

    def test_keys(self, k3):
        doc = json.loads(_dump(estimate_lambda(k3)))
        assert set(doc) == {"lambda", "lambda_raw", "tolerance", "iterations_used", "connected",
                            "bipartite", "n", "m", "format_version"}


def _dump(meta) -> str:
    buf = io.StringIO()
    write_meta(meta, buf)
    return buf.getvalue()
