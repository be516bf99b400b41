import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import hitting_matrix_powers, random_digraph
from simpush.engine import derive_params, source_push
from simpush.graph import DirectedGraph

SQRT_C = math.sqrt(0.6)


def with_cycle(n, p, seed):
    g = random_digraph(n, p, seed)
    ring = [(i, (i + 1) % n) for i in range(n)]
    return DirectedGraph.from_edges(np.vstack([g.edges(), ring]), n=n)


def test_dangling_source_has_no_levels():
    g = DirectedGraph.from_edges([(0, 1), (1, 2)])
    sg, att = source_push(g, 0, 5, derive_params(0.6, 0.05))
    assert sg.L == 0
    assert att.total == 0
    assert sg.hitting(0, 0) == 1.0


def test_two_cycle_levels(two_cycle):
    sg, _ = source_push(two_cycle, 0, 2, derive_params(0.6, 0.05))
    assert sg.nodes[1].tolist() == [1] and sg.nodes[2].tolist() == [0]
    assert sg.hitting(1, 1) == pytest.approx(SQRT_C, abs=1e-15)
    assert sg.hitting(2, 0) == pytest.approx(0.6, abs=1e-15)


def test_same_node_on_two_levels(revisit_graph):
    params = dataclasses.replace(derive_params(0.6, 0.05), eps_h=0.12)
    sg, att = source_push(revisit_graph, 0, 3, params)
    assert sg.hitting(1, 3) == pytest.approx(SQRT_C / 3)
    assert sg.hitting(2, 7) == pytest.approx(SQRT_C / 3 * SQRT_C / 2)
    assert sg.hitting(3, 3) == pytest.approx(0.6 / 6 * SQRT_C)
    assert att.contains(1, 3)
    assert not att.contains(3, 3)
    assert sg.position(3, 3) >= 0


def test_meeting_graph_attention(meeting_graph):
    params = dataclasses.replace(derive_params(0.6, 0.05), eps_h=0.2)
    sg, att = source_push(meeting_graph, 0, 3, params)
    assert {lv: att.level(lv).tolist() for lv in (1, 2, 3)} == {1: [1, 2], 2: [4], 3: [5]}
    assert sg.hitting(2, 3) == pytest.approx(0.15)
    assert sg.in_edges(1, 1).tolist() == [3, 4]
    assert sg.in_edges(2, 4).tolist() == [5, 6]


@pytest.mark.parametrize("seed", range(4))
def test_level_mass_without_dangling_nodes(seed):
    g = with_cycle(60, 0.05, seed)
    sg, _ = source_push(g, seed, 15, derive_params(0.6, 0.05))
    assert sg.L == 15
    for level in range(sg.L + 1):
        assert abs(sg.level_mass(level) - SQRT_C ** level) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 40), st.floats(0.02, 0.4), st.integers(0, 10 ** 6), st.integers(1, 8))
def test_matches_matrix_powers(n, p, seed, L):
    g = random_digraph(n, p, seed, self_loops=True)
    sg, _ = source_push(g, 0, L, derive_params(0.6, 0.05))
    exact = hitting_matrix_powers(g, 0, 0.6, L)
    for level in range(L + 1):
        dense = np.zeros(n)
        if level <= sg.L:
            dense[sg.nodes[level]] = sg.hit[level]
            assert np.all(sg.hit[level] > 0)
        np.testing.assert_allclose(dense, exact[level], rtol=0, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 60), st.floats(0.02, 0.3), st.integers(0, 10 ** 6))
def test_attention_bound_and_adjacent_edges(n, p, seed):
    g = random_digraph(n, p, seed)
    params = derive_params(0.6, 0.05)
    sg, att = source_push(g, 0, params.L_star, params)
    assert att.total <= params.attention_bound
    for level in range(1, sg.L + 1):
        assert np.all(att.hit[level] >= params.eps_h)
        assert att.level(level).size == int((sg.hit[level] >= params.eps_h).sum())
    for level, e in enumerate(sg.edges):
        assert e.shape == (sg.nodes[level].size, sg.nodes[level + 1].size)
        for i, v in enumerate(sg.nodes[level]):
            linked = sg.nodes[level + 1][e.indices[e.indptr[i]:e.indptr[i + 1]]]
            assert set(linked.tolist()) == set(g.in_neighbors(v).tolist())


def test_rejects_negative_depth(two_cycle):
    with pytest.raises(ValueError):
        source_push(two_cycle, 0, -1, derive_params(0.6, 0.05))
