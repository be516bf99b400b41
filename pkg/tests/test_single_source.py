import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import random_digraph
from simpush.engine import derive_params, run_query, single_source
from simpush.engine.pipeline import STAGES
from simpush.graph import DirectedGraph
from simpush.oracle import exact_simrank


def test_isolated_source():
    g = DirectedGraph.from_edges([(1, 2)], n=4)
    vec = single_source(g, 3)
    assert vec.values.tolist() == [0.0, 0.0, 0.0, 1.0]


def test_out_of_range():
    with pytest.raises(IndexError):
        single_source(DirectedGraph.from_edges([(0, 1)]), 2)


def test_shared_single_parent():
    # s(1, 2) = c exactly: both walks step to node 0 together
    g = DirectedGraph.from_edges([(0, 1), (0, 2)])
    for eps in (0.05, 0.02):
        s = single_source(g, 1, eps=eps)[2]
        assert 0.6 - eps <= s <= 0.6 + 1e-12


def test_within_error_on_random_graph():
    g = random_digraph(50, 0.1, seed=5)
    exact = exact_simrank(g, 0.6, K=40).matrix
    for u in (0, 7, 31):
        vec = single_source(g, u, eps=0.05, seed=2)
        diff = exact[u] - vec.values
        assert diff.max() <= 0.05
        assert diff.min() >= -1e-7


def test_deterministic_and_seed_sensitive():
    g = random_digraph(40, 0.15, seed=8)
    a = single_source(g, 4, eps=0.05, seed=1).values
    b = single_source(g, 4, eps=0.05, seed=1).values
    np.testing.assert_array_equal(a, b)


def test_query_result_structure():
    g = random_digraph(40, 0.1, seed=3)
    res = run_query(g, 0, derive_params(0.6, 0.05))
    assert set(res.timings) == set(STAGES)
    assert 1 <= res.L <= res.params.L_star
    assert res.n_attention <= res.params.attention_bound
    assert np.all((res.vector.values >= 0) & (res.vector.values <= 1))


@settings(max_examples=15, deadline=None)
@given(st.integers(5, 40), st.floats(0.05, 0.4), st.integers(0, 10 ** 6))
def test_never_overestimates(n, p, seed):
    g = random_digraph(n, p, seed, self_loops=seed % 2 == 0)
    exact = exact_simrank(g, 0.6, K=40).matrix
    vec = single_source(g, seed % n, eps=0.1, seed=seed)
    assert np.all(vec.values <= exact[seed % n] + 1e-7)
    assert np.all(exact[seed % n] - vec.values <= 0.1)
