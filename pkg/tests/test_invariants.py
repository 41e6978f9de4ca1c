import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CROSSING_SQUARE, FAR_A, FAR_B
from oracles import writhe_exact
from randlink import seeding
from randlink.cycles import count_pairs_closed_form, enumerate_cycles, enumerate_disjoint_pairs
from randlink.errors import DegenerateProjection, EnumerationCapExceeded, InsufficientSamples, NoPairs
from randlink.geometry import direction_from_uniforms, linking_number, project
from randlink.invariants import (LinkTally, link_tally, mean_average_link, mean_squared_writhe,
                                 mean_sum_sq_link, proportion_by_lk, sample_link_tallies,
                                 sample_polygon_writhe, sample_writhe_squares, sum_sq_writhe)
from randlink.models import (Graph, LinearEmbedding, complete_graph, disjoint_cycles_graph,
                             gnp_graph, sample_embedding, tripartite_331)
from randlink.seeding import SeedSpec

seeds = st.integers(0, 2**64 - 1)


def tally_by_pairs(e):
    """Reference tally: one projected linking number per enumerated pair."""
    return LinkTally.from_values(
        linking_number(e.polygon(a), e.polygon(b)) for a, b in enumerate_disjoint_pairs(e.graph))


# --- link tallies -----------------------------------------------------------


def test_far_triangles_tally():
    e = LinearEmbedding(disjoint_cycles_graph(3, 3), np.vstack([FAR_A, FAR_B]))
    t = link_tally(e)
    assert t.counts == {0: 1} and t.sum_sq == 0 and t.total_pairs == 1


@pytest.mark.parametrize("g", [complete_graph(7), tripartite_331(), complete_graph(6)],
                         ids=["K7", "K331", "K6"])
def test_tally_matches_pairwise_linking(g):
    for i in range(20):
        e = sample_embedding(g, SeedSpec(3, i))
        assert link_tally(e) == tally_by_pairs(e)


@given(seeds, st.integers(0, 10**6))
def test_k6_embeddings_have_one_or_three_hopf_links(master, index):
    t = link_tally(sample_embedding(complete_graph(6), SeedSpec(master, index)))
    assert t.sum_sq in (1, 3)
    assert t.nonzero in (1, 3) and t.counts.get(1, 0) == t.nonzero


@given(seeds, st.integers(0, 10**6))
def test_k331_embeddings_follow_classification(master, index):
    t = link_tally(sample_embedding(tripartite_331(), SeedSpec(master, index)))
    assert t.total_pairs == 9
    assert t.sum_sq in (1, 3, 5, 7)
    assert 1 <= t.nonzero <= 5
    if t.nonzero % 2 == 0:
        assert t.counts.get(2, 0) == 1 and t.counts.get(1, 0) == t.nonzero - 1
    else:
        assert t.counts.get(1, 0) == t.nonzero


@pytest.mark.parametrize("n", range(6, 10))
def test_tally_totals_match_closed_form(n):
    t = link_tally(sample_embedding(complete_graph(n), SeedSpec(1)))
    expected = sum(count_pairs_closed_form(n, k, l)
                   for k in range(3, n) for l in range(k, n - k + 1))
    assert t.total_pairs == expected == sum(t.counts.values())
    assert t.sum_sq == sum(k * k * c for k, c in t.counts.items())


def test_degenerate_embedding_names_pair():
    coords = np.vstack([FAR_A, FAR_B])
    coords[4] = coords[3] + (0.0, 0.0, 0.5)   # vertical edge
    coords[3:] -= (10.0, 0.0, 0.0)
    coords[3:, 2] += 2.0
    with pytest.raises(DegenerateProjection) as info:
        link_tally(LinearEmbedding(disjoint_cycles_graph(3, 3), coords))
    assert info.value.pair is not None


# --- aggregates -------------------------------------------------------------


def test_mean_sum_sq_constant_stream():
    ts = [LinkTally.from_values([1, 1, -1])] * 3
    assert mean_sum_sq_link(ts) == (3.0, 0.0)


def test_mean_sum_sq_needs_two_samples():
    with pytest.raises(InsufficientSamples):
        mean_sum_sq_link([LinkTally.from_values([1])])


def test_average_link_single_pair():
    assert mean_average_link([LinkTally.from_values([2])]) == (4.0, 2.0)


def test_average_link_needs_pairs():
    with pytest.raises(NoPairs):
        mean_average_link([LinkTally.from_values([1]), LinkTally()])
    assert mean_average_link([LinkTally.from_values([1]), LinkTally()], skip_empty=True) == (1.0, 1.0)
    with pytest.raises(NoPairs):
        proportion_by_lk([LinkTally()])


def test_proportions_sum_to_one():
    result = sample_link_tallies(complete_graph(7), 200, 4)
    props = proportion_by_lk(result.tallies())
    assert sum(props.values()) == pytest.approx(1.0, abs=1e-12)


def test_k6_average_square_equals_average_absolute():
    ts = sample_link_tallies(complete_graph(6), 300, 5).tallies()
    sq, ab = mean_average_link(ts)
    assert sq == ab


# --- batched sampling -------------------------------------------------------


def test_batch_equals_per_embedding():
    g = tripartite_331()
    result = sample_link_tallies(g, 50, 77, start=1000)
    for i in range(50):
        assert result.tally(i) == link_tally(sample_embedding(g, result.seed_of(i)))


def test_gnp_batch_equals_per_sample_graphs():
    result = sample_link_tallies(None, 40, 13, n=9, p=0.5)
    for i in range(40):
        g = gnp_graph(9, 0.5, SeedSpec(13, i))
        e = sample_embedding(g, result.seed_of(i))
        assert result.tally(i) == tally_by_pairs(e)


def test_batch_independent_of_threads():
    import numba
    g = complete_graph(8)
    runs = [sample_link_tallies(g, 64, 2, threads=t) for t in (1, numba.config.NUMBA_NUM_THREADS)]
    assert np.array_equal(runs[0].counts, runs[1].counts)
    assert np.array_equal(runs[0].sum_sq, runs[1].sum_sq)


def test_batch_split_equals_whole():
    g = complete_graph(7)
    whole = sample_link_tallies(g, 30, 8)
    a = sample_link_tallies(g, 10, 8)
    b = sample_link_tallies(g, 20, 8, start=10)
    assert np.array_equal(whole.sum_sq, np.concatenate([a.sum_sq, b.sum_sq]))


def test_enumeration_cap():
    with pytest.raises(EnumerationCapExceeded):
        sample_link_tallies(complete_graph(13), 1, 0)
    with pytest.raises(EnumerationCapExceeded):
        sample_writhe_squares(None, 1, 0, 1, n=14, p=0.5)


def test_zero_samples_rejected():
    with pytest.raises(ValueError):
        sample_link_tallies(complete_graph(6), 0, 0)


# --- writhe -----------------------------------------------------------------


def test_triangle_mean_squared_writhe_is_zero(rng):
    for d in (1, 10, 100):
        assert mean_squared_writhe(rng.random((3, 3)), d, rng).estimate == 0.0


def test_crossing_square_along_z():
    est = mean_squared_writhe(CROSSING_SQUARE, fixed_directions=[(0, 0, 1)])
    assert est.estimate == 1.0 and est.directions == 1


def test_single_triangle_graph_writhe_zero(rng):
    e = sample_embedding(complete_graph(3), SeedSpec(0))
    assert sum_sq_writhe(e, 20, rng) == 0.0


def test_writhe_batch_equals_brute_force():
    g = complete_graph(5)
    D = 4
    values, redrawn = sample_writhe_squares(g, 6, 21, D)
    assert redrawn == 0
    for s in range(6):
        P = sample_embedding(g, SeedSpec(21, s)).coords
        u = seeding.uniforms(SeedSpec(21, s), seeding.DIRECTIONS, 2 * D)
        by_len = np.zeros(6)
        for j in range(D):
            Q = project(P, direction_from_uniforms(u[2 * j], u[2 * j + 1]))
            for c in enumerate_cycles(g):
                by_len[len(c)] += writhe_exact(Q[list(c)]) ** 2
        np.testing.assert_allclose(values[s], by_len / D, rtol=0, atol=1e-12)


def test_writhe_values_nonnegative_and_triangles_zero():
    values, _ = sample_writhe_squares(complete_graph(6), 50, 3, 10)
    assert np.all(values >= 0)
    assert np.all(values[:, 3] == 0)


def test_more_directions_reduce_variance():
    rng = np.random.default_rng(12)
    P = rng.random((7, 3))
    spread = {}
    for D in (10, 40):
        spread[D] = np.var([mean_squared_writhe(P, D, rng).estimate for _ in range(200)])
    assert spread[40] < spread[10]


def test_polygon_writhe_reproducible():
    a, _ = sample_polygon_writhe(6, 20, 9, 8)
    b, _ = sample_polygon_writhe(6, 20, 9, 8)
    assert np.array_equal(a, b)


def test_gnp_without_edges_has_zero_writhe():
    values, _ = sample_writhe_squares(Graph(6, ()), 3, 0, 2)
    assert np.all(values == 0)
