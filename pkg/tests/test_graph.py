import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nfvr.graph import (MISSING, Attribute, GraphFormatError, Kind, SchemaOptions, discretize, from_edge_array,
                        load_graph, write_graph)

from conftest import dense_adjacency, floyd_warshall, gnp_edges, random_attributed_graph


def test_dedup_and_self_loops_dropped():
    g = load_graph(io.StringIO("0 1\n1 0\n1 1\n"))
    assert g.m == 1
    assert g.degree(0) == g.degree(1) == 1
    assert g.load_stats.self_loops == 1
    assert g.load_stats.duplicate_edges == 1


def test_schema_construction():
    g = load_graph(io.StringIO("0 1\n1 2\n"), io.StringIO("node,gender\n0,M\n1,F\n2,?\n"))
    assert (g.n, g.t) == (3, 1)
    a = g.attributes[0]
    assert a.levels == ("M", "F", MISSING)
    assert a.n_levels == 3
    assert a.missing_index == 2
    assert list(g.columns[0]) == [0, 1, 2]


def test_missing_level_present_even_if_unused():
    g = load_graph(io.StringIO("a b\n"), io.StringIO("node,x\na,u\nb,w\n"))
    assert g.attributes[0].levels == ("u", "w", MISSING)


def test_empty_cell_is_missing():
    g = load_graph(io.StringIO("0 1\n1 2\n"), io.StringIO("node,x,y\n0,a,1\n1,,\n2,b,3\n"))
    assert g.attributes[0].levels == ("a", "b", MISSING)
    assert list(g.columns[0]) == [0, 2, 1]
    assert np.isnan(g.columns[1][1])


def test_numeric_detection_and_forced_nominal():
    edges = "0 1\n1 2\n"
    attrs = "node,year,score\n0,2008,0.5\n1,2009,?\n2,2008,1.5\n"
    g = load_graph(io.StringIO(edges), io.StringIO(attrs))
    assert [a.kind for a in g.attributes] == [Kind.CONTINUOUS, Kind.CONTINUOUS]
    assert np.isnan(g.columns[1][1])
    g = load_graph(io.StringIO(edges), io.StringIO(attrs), SchemaOptions(frozenset({"year"})))
    assert g.attributes[0].kind is Kind.NOMINAL
    assert g.attributes[0].levels == ("2008", "2009", MISSING)


def test_node_ids_sorted_numerically():
    g = load_graph(io.StringIO("10 2\n2 1\n"))
    assert g.node_ids == ("1", "2", "10")
    assert list(g.neighbors(1)) == [0, 2]


def test_isolated_attribute_only_node_allowed():
    g = load_graph(io.StringIO("a b\n"), io.StringIO("node,x\na,1\nb,2\nc,3\n"),
                   SchemaOptions(all_nominal=True))
    assert g.n == 3
    assert g.degree(g.node_ids.index("c")) == 0


@pytest.mark.parametrize("edges, attrs, msg", [
    ("0 1\n0 1 2\n", None, "line 2"),
    ("# comment\n0\n", None, "line 2"),
    ("0 1\n1 2\n", "node,x\n0,a\n1,b\n", "lack attribute rows"),
    ("0 1\n", "node,x\n0,a,b\n1,c,d\n", "line 2"),
    ("0 1\n", "id,x\n0,a\n1,b\n", "header"),
])
def test_load_errors(edges, attrs, msg):
    with pytest.raises(GraphFormatError, match=msg):
        load_graph(io.StringIO(edges), io.StringIO(attrs) if attrs else None)


def test_comments_ignored():
    g = load_graph(io.StringIO("# header\n0 1\n\n# more\n1 2\n"))
    assert g.m == 2


def test_round_trip_50_nodes(tmp_path):
    g = random_attributed_graph(50, 0.1, seed=3, levels=(3, 2))
    write_graph(g, tmp_path / "g.edges", tmp_path / "g.csv")
    g2 = load_graph(tmp_path / "g.edges", tmp_path / "g.csv")
    assert g2.node_ids == g.node_ids
    np.testing.assert_array_equal(g2.indptr, g.indptr)
    np.testing.assert_array_equal(g2.indices, g.indices)
    # the written files are themselves deterministic
    write_graph(g2, tmp_path / "h.edges", tmp_path / "h.csv")
    assert (tmp_path / "g.edges").read_bytes() == (tmp_path / "h.edges").read_bytes()


def test_neighbors_path(path3):
    assert list(path3.neighbors(1)) == [0, 2]
    assert path3.degree(1) == 2


def test_neighbors_isolated():
    g = from_edge_array(3, [(0, 1)])
    assert len(g.neighbors(2)) == 0


def test_neighbors_out_of_range(path3):
    with pytest.raises(IndexError):
        path3.neighbors(3)
    with pytest.raises(IndexError):
        path3.hop_shell(-1, 1)


def test_neighbors_match_dense_rows():
    rng = np.random.default_rng(0)
    g = from_edge_array(20, gnp_edges(20, 0.3, rng))
    A = dense_adjacency(g)
    for v in range(20):
        assert list(g.neighbors(v)) == list(np.nonzero(A[v])[0])


def test_hop_shell_path(path3):
    assert set(path3.hop_shell(0, 2)) == {2}
    assert set(path3.hop_shell(0, 3)) == set()
    for v in range(3):
        assert list(path3.hop_shell(v, 0)) == [v]


def test_hop_shell_matches_floyd_warshall():
    rng = np.random.default_rng(7)
    g = from_edge_array(40, gnp_edges(40, 0.1, rng))
    D = floyd_warshall(dense_adjacency(g))
    for v in range(g.n):
        for h in (1, 2, 3):
            assert set(g.hop_shell(v, h).tolist()) == set(np.nonzero(D[v] == h)[0].tolist())


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 25), p=st.floats(0.0, 0.5), seed=st.integers(0, 10_000))
def test_graph_invariants(n, p, seed):
    g = from_edge_array(n, gnp_edges(n, p, np.random.default_rng(seed)))
    A = dense_adjacency(g)
    assert (A == A.T).all()
    assert g.degrees.sum() == 2 * g.m
    D = floyd_warshall(A)
    for v in range(n):
        nb = g.neighbors(v)
        assert v not in nb
        assert (np.diff(nb) > 0).all()
        assert set(g.hop_shell(v, 1).tolist()) == set(nb.tolist())
        shells = g.hop_shells(v, n)
        reached = sum(len(s) for s in shells)
        assert reached + int(np.isinf(D[v]).sum()) == n


def test_discretize_equal_width():
    g = load_graph(io.StringIO("0 1\n1 2\n"), io.StringIO("node,x\n0,0.0\n1,0.5\n2,1.0\n"))
    d = discretize(g, "x", 2)
    assert d.attributes[0].kind is Kind.DISCRETIZED
    assert d.attributes[0].levels == ("bin0", "bin1", MISSING)
    assert list(d.columns[0]) == [0, 1, 1]


def test_discretize_constant_and_missing():
    g = load_graph(io.StringIO("0 1\n1 2\n"), io.StringIO("node,x\n0,3\n1,?\n2,3\n"))
    d = discretize(g, 0, 5)
    assert list(d.columns[0]) == [0, 5, 0]


def test_discretize_errors():
    g = load_graph(io.StringIO("0 1\n"), io.StringIO("node,x\n0,a\n1,b\n"))
    with pytest.raises(ValueError, match="nominal"):
        discretize(g, "x", 5)
    g = load_graph(io.StringIO("0 1\n"), io.StringIO("node,y\n0,1\n1,2\n"))
    with pytest.raises(ValueError, match="bins"):
        discretize(g, "y", 1)


def test_discretize_all_missing():
    g = from_edge_array(2, [(0, 1)], [Attribute("y", Kind.CONTINUOUS)], [np.array([np.nan, np.nan])])
    with pytest.raises(ValueError, match="no non-missing"):
        discretize(g, 0, 3)
    with pytest.raises(GraphFormatError, match="no non-missing"):
        load_graph(io.StringIO("0 1\n"), io.StringIO("node,y\n0,?\n1,?\n"))


def test_discretize_uniform_counts():
    rng = np.random.default_rng(11)
    x = rng.random(1000)
    g = from_edge_array(1000, np.empty((0, 2)), [Attribute("x", Kind.CONTINUOUS)], [x])
    d = discretize(g, 0, 5)
    counts = np.bincount(d.columns[0], minlength=6)
    # direct binning oracle
    lo, hi = x.min(), x.max()
    oracle = [sum(1 for v in x if lo + k * (hi - lo) / 5 <= v < lo + (k + 1) * (hi - lo) / 5
                  or (k == 4 and v == hi)) for k in range(5)]
    assert list(counts[:5]) == oracle
    assert all(abs(c - 200) <= 60 for c in counts[:5])


def test_discretize_idempotent():
    rng = np.random.default_rng(2)
    g = from_edge_array(100, gnp_edges(100, 0.05, rng), [Attribute("x", Kind.CONTINUOUS)],
                        [rng.normal(size=100)])
    once = discretize(g, 0, 4)
    twice = discretize(once, 0, 4)
    np.testing.assert_array_equal(once.columns[0], twice.columns[0])
    assert once.attributes == twice.attributes


def test_discretize_quantile():
    x = np.arange(100, dtype=float) ** 2
    g = from_edge_array(100, np.empty((0, 2)), [Attribute("x", Kind.CONTINUOUS)], [x])
    d = discretize(g, 0, 4, method="quantile")
    assert list(np.bincount(d.columns[0])[:4]) == [25, 25, 25, 25]


def test_relabel_keeps_structure():
    g = random_attributed_graph(15, 0.3, seed=1)
    perm = np.random.default_rng(0).permutation(15)
    r = g.relabel(perm)
    A, B = dense_adjacency(g), dense_adjacency(r)
    np.testing.assert_array_equal(B[np.ix_(perm, perm)], A)
    np.testing.assert_array_equal(r.columns[0][perm], g.columns[0])


def test_graph_is_read_only(path3):
    with pytest.raises(ValueError):
        path3.indices[0] = 5
    with pytest.raises(ValueError):
        path3.columns[0][0] = 1
