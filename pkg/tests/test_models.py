import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from randlink.errors import CycleTooShort, DuplicateEdge, IndexOutOfRange, InvalidProbability, ParseError
from randlink.models import (Graph, LinearEmbedding, complete_graph, disjoint_cycles_graph,
                             dump_embedding, gnp_graph, load_embedding, sample_embedding,
                             tripartite_331)
from randlink.seeding import SeedSpec


@pytest.mark.parametrize("n,m", [(3, 3), (6, 15), (12, 66), (1, 0)])
def test_complete_graph_edge_count(n, m):
    assert complete_graph(n).m == m


def test_graph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph(3, ((0, 0),))
    with pytest.raises(ValueError):
        Graph(3, ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        Graph(3, ((0, 3),))


def test_graph_normalizes_edges():
    g = Graph(4, ((3, 1), (0, 2)))
    assert g.edges == ((0, 2), (1, 3))
    assert g.has_edge(3, 1) and not g.has_edge(0, 1)


def test_gnp_rejects_bad_probability():
    for p in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(InvalidProbability):
            gnp_graph(6, p, SeedSpec(1))


def test_gnp_is_deterministic():
    assert gnp_graph(9, 0.4, SeedSpec(3, 17)).edges == gnp_graph(9, 0.4, SeedSpec(3, 17)).edges
    assert gnp_graph(9, 0.4, SeedSpec(3, 17)).edges != gnp_graph(9, 0.4, SeedSpec(3, 18)).edges


def test_gnp_mean_edge_count():
    counts = [gnp_graph(6, 0.5, SeedSpec(11, i)).m for i in range(10_000)]
    assert abs(np.mean(counts) - 7.5) < 0.15


def test_gnp_single_edge_frequency():
    p = 0.3
    hits = sum(gnp_graph(2, p, SeedSpec(5, i)).m for i in range(100_000))
    sigma = np.sqrt(p * (1 - p) / 100_000)
    assert abs(hits / 100_000 - p) < 3 * sigma


def test_tripartite_331():
    g = tripartite_331()
    assert g.n == 7 and g.m == 15
    for part in g.parts:
        for i in part:
            for j in part:
                assert not g.has_edge(i, j)
    (apex,) = [p for p in g.parts if len(p) == 1][0]
    assert g.degree(apex) == 6


@pytest.mark.parametrize("k,l", [(3, 3), (3, 4), (5, 7)])
def test_disjoint_cycles_graph(k, l):
    g = disjoint_cycles_graph(k, l)
    assert g.n == k + l and g.m == k + l
    assert g.components() == 2


def test_disjoint_cycles_too_short():
    with pytest.raises(CycleTooShort):
        disjoint_cycles_graph(2, 5)


def test_embedding_in_cube_and_reproducible():
    g = complete_graph(8)
    e = sample_embedding(g, SeedSpec(42, 3))
    assert e.coords.shape == (8, 3)
    assert e.in_cube
    assert np.array_equal(e.coords, sample_embedding(g, SeedSpec(42, 3)).coords)
    assert not np.array_equal(e.coords, sample_embedding(g, SeedSpec(42, 4)).coords)


def test_embedding_coordinate_means():
    g = complete_graph(1)
    pts = np.array([sample_embedding(g, SeedSpec(9, i)).coords[0] for i in range(100_000)])
    np.testing.assert_allclose(pts.mean(axis=0), 0.5, atol=0.005)


def test_load_k6_file():
    coords = "\n".join(f"{i * 0.1} {i * 0.13 % 1} {i * 0.37 % 1}" for i in range(6))
    edges = "\n".join(f"{i} {j}" for i in range(6) for j in range(i + 1, 6))
    e = load_embedding(f"# K6\n6 15\n{coords}\n{edges}\n")
    assert e.graph.m == 15 and e.graph == complete_graph(6)


@pytest.mark.parametrize("text,exc,line", [
    ("2 1\n0 0 0\n1 1 1\n0 0\n", ParseError, 4),
    ("2 2\n0 0 0\n1 1 1\n0 1\n0 1\n", DuplicateEdge, 5),
    ("2 1\n0 0 0\n1 1 1\n0 2\n", IndexOutOfRange, 4),
    ("2 1\n0 0 0\n1 1 x\n0 1\n", ParseError, 3),
    ("2 1\n0 0 0\n", ParseError, 2),
    ("", ParseError, None),
])
def test_load_errors_carry_line_numbers(text, exc, line):
    with pytest.raises(exc) as info:
        load_embedding(text)
    assert info.value.line == line


def test_load_flags_points_outside_cube():
    e = load_embedding("3 3\n0 0 0\n2 0 0\n0 1 0\n0 1\n1 2\n0 2\n")
    assert not e.in_cube


@given(st.integers(1, 9), st.integers(0, 2**64 - 1), st.integers(0, 1000))
def test_dump_load_round_trip(n, master, index):
    e = sample_embedding(complete_graph(n), SeedSpec(master, index))
    back = load_embedding(dump_embedding(e))
    assert back.graph == e.graph
    assert np.array_equal(back.coords, e.coords)


def test_polygon_follows_cycle_order():
    e = LinearEmbedding(complete_graph(4), np.arange(12, dtype=float).reshape(4, 3))
    assert np.array_equal(e.polygon((0, 2, 1)), e.coords[[0, 2, 1]])
