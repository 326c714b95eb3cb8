import io
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_sis.errors import ConvergenceError, EdgeListError
from adaptive_sis.graph import (Graph, complete_graph, cycle_graph, from_arcs, gnp_random_graph,
                                largest_eigenvalue, load_edge_list, path_graph, star_graph)
from oracles import dense_spectral_radius


def test_path_edge_list_undirected():
    g = load_edge_list("0 1\n1 2")
    assert g.n == 3
    assert g.num_arcs == 4
    assert g.num_edges == 2
    assert set(map(tuple, g.arcs)) == {(0, 1), (1, 0), (1, 2), (2, 1)}


def test_self_loop_dropped_with_warning(caplog):
    with caplog.at_level(logging.WARNING):
        g = load_edge_list("0 0\n0 1")
    assert g.n == 2
    assert g.num_arcs == 2
    assert g.dropped_self_loops == 1
    assert "self-loop" in caplog.text


def test_directed_keeps_orientation():
    g = load_edge_list("0 1\n1 2\n0 1", directed=True)
    assert g.num_arcs == 2
    A = g.dense()
    # u -> v stored as A[v, u]
    assert A[1, 0] == 1 and A[0, 1] == 0


def test_comments_header_and_remap():
    g = load_edge_list("# AS peers\n100 7\n7 3000\n")
    assert g.n == 3
    assert list(g.node_ids) == [7, 100, 3000]
    assert g.num_edges == 2

    g = load_edge_list("n=5\n0 1\n")
    assert g.n == 5
    assert g.in_degree.tolist() == [1, 1, 0, 0, 0]


@pytest.mark.parametrize("text, line", [("0 1\n1 x\n", 2), ("0 1\n\n3\n", 3)])
def test_malformed_line_reports_number(text, line):
    with pytest.raises(EdgeListError) as exc:
        load_edge_list(text)
    assert exc.value.line == line


def test_empty_input_rejected():
    with pytest.raises(EdgeListError):
        load_edge_list("# nothing here\n\n")


def test_header_out_of_range():
    with pytest.raises(EdgeListError):
        load_edge_list("n=2\n0 5\n")


def test_stream_input():
    g = load_edge_list(io.StringIO("0 1\n1 2\n2 0\n"))
    assert g.n == 3 and g.num_edges == 3


@given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=1, max_size=60))
def test_symmetrization_idempotent(pairs):
    text = "\n".join(f"{u} {v}" for u, v in pairs)
    g1 = load_edge_list(text)
    doubled = text + "\n" + "\n".join(f"{v} {u}" for u, v in pairs)
    g2 = load_edge_list(doubled)
    assert g1.n == g2.n
    assert np.array_equal(g1.arcs, g2.arcs)
    A = g1.dense()
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 0)


def test_graph_rejects_bad_arcs():
    with pytest.raises(ValueError):
        Graph(3, np.array([[0, 3]]))
    with pytest.raises(ValueError):
        Graph(3, np.array([[1, 1]]))


def test_in_neighbors():
    g = from_arcs(4, [(0, 3), (1, 3), (3, 2)], directed=True)
    assert sorted(g.in_neighbors(3)) == [0, 1]
    assert list(g.in_neighbors(0)) == []


def test_complete_k4():
    r = largest_eigenvalue(complete_graph(4))
    assert r.lambda1 == pytest.approx(3.0, abs=1e-9)
    assert r.residual < 1e-9


def test_star_nine_leaves():
    # bipartite: +-3 eigenvalues, needs the shift to converge
    r = largest_eigenvalue(star_graph(9))
    assert r.lambda1 == pytest.approx(3.0, abs=1e-9)


@pytest.mark.parametrize("n", range(3, 21))
def test_complete_and_cycle_exact(n):
    assert largest_eigenvalue(complete_graph(n)).lambda1 == pytest.approx(n - 1, abs=1e-9)
    assert largest_eigenvalue(cycle_graph(n)).lambda1 == pytest.approx(2.0, abs=1e-9)


def test_path_graph():
    # lambda1(P_n) = 2 cos(pi / (n + 1))
    assert largest_eigenvalue(path_graph(5)).lambda1 == pytest.approx(2 * math.cos(math.pi / 6), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 50), st.floats(0.02, 0.6), st.integers(0, 10_000), st.booleans())
def test_matches_dense_oracle(n, p, seed, directed):
    g = gnp_random_graph(n, p, seed=seed, directed=directed)
    r = largest_eigenvalue(g, tol=1e-13)
    assert r.lambda1 == pytest.approx(dense_spectral_radius(g.dense()), abs=1e-7)


def test_disconnected_dominant_component_wins():
    g = from_arcs(7, [(0, 1), (1, 2), (0, 2), (3, 4), (5, 6)])
    assert largest_eigenvalue(g).lambda1 == pytest.approx(2.0, abs=1e-9)


def test_edgeless_graph():
    assert largest_eigenvalue(Graph(4, np.zeros((0, 2)))).lambda1 == 0.0


def test_nonconvergence_carries_estimate():
    with pytest.raises(ConvergenceError) as exc:
        largest_eigenvalue(gnp_random_graph(40, 0.2, seed=1), tol=1e-15, max_iter=3)
    assert exc.value.iterations == 3
    assert exc.value.estimate > 0


def test_directed_acyclic_is_zero():
    g = from_arcs(4, [(0, 1), (1, 2), (0, 3), (2, 3)], directed=True)
    assert largest_eigenvalue(g).lambda1 == 0.0
    assert dense_spectral_radius(g.dense()) == pytest.approx(0.0, abs=1e-12)


def test_directed_defective_dominant_eigenvalue():
    # two 2-cycles joined by one arc: lambda1 = 1 sits in a 2x2 Jordan block
    g = from_arcs(4, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)], directed=True)
    r = largest_eigenvalue(g)
    assert r.lambda1 == pytest.approx(1.0, abs=1e-12)
    assert r.residual < 1e-9
