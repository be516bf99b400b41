import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import brute_force_confined_hitting, brute_force_first_meeting, random_digraph
from simpush.engine import (ConsistencyError, compute_residues, derive_params, first_meeting,
                            first_meeting_level, hitting_in_source_graph, last_meeting,
                            last_meeting_all, source_push)
from simpush.graph import DirectedGraph

SQRT_C = math.sqrt(0.6)


def build(g, u, L, eps_h):
    params = dataclasses.replace(derive_params(0.6, 0.05), eps_h=eps_h)
    sg, att = source_push(g, u, L, params)
    return sg, att, hitting_in_source_graph(sg, att)


@pytest.fixture
def meeting(meeting_graph):
    return build(meeting_graph, 0, 3, 0.2)


def test_meeting_hitting(meeting):
    sg, att, hit = meeting
    assert hit.value(1, 1, 3, 5) == pytest.approx(0.45, abs=1e-12)
    assert hit.value(1, 1, 2, 4) == pytest.approx(SQRT_C / 2, abs=1e-12)
    assert hit.value(2, 4, 3, 5) == pytest.approx(SQRT_C / 2, abs=1e-12)
    assert hit.value(1, 1, 1, 1) == 1.0
    # the non-attention occurrence relays mass but is never a target
    assert hit.value(1, 1, 2, 3) == 0.0


def test_meeting_first_meeting(meeting):
    sg, att, hit = meeting
    rho = first_meeting(hit, 1, 1)
    assert rho[(2, 4)] == pytest.approx(0.15, abs=5e-4)
    assert rho[(3, 5)] == pytest.approx(0.45 ** 2 - 0.15 * (SQRT_C / 2) ** 2, abs=1e-12)
    assert rho[(3, 5)] == pytest.approx(0.18, abs=1e-3)
    assert last_meeting(sg, att, hit, 1, 1) == pytest.approx(1 - rho[(2, 4)] - rho[(3, 5)])


def test_meeting_against_brute_force(meeting):
    sg, att, hit = meeting
    attention = {(lv, w) for lv, w, _ in att.occurrences()}
    for lv, w, _ in att.occurrences():
        expect = brute_force_first_meeting(sg, attention, lv, w)
        got = first_meeting(hit, lv, w)
        assert got.keys() <= expect.keys()
        for key, val in expect.items():
            assert got.get(key, 0.0) == pytest.approx(val, abs=1e-12)


def test_path_graph_powers():
    n = 8
    g = DirectedGraph.from_edges([(i + 1, i) for i in range(n - 1)])
    sg, att, hit = build(g, 0, n - 1, 1e-6)
    for i in range(1, n - 1):
        assert hit.value(1, 1, 1 + i, 1 + i) == pytest.approx(SQRT_C ** i, rel=1e-12)
    # a single walk cannot disagree with itself, so every attention descendant is met first at the next level
    gam = last_meeting_all(hit)
    assert gam.value(att, n - 1, n - 1) == 1.0
    assert gam.value(att, 1, 1) == pytest.approx(1 - 0.6, abs=1e-12)


def test_deepest_level_gamma_is_one(meeting):
    _, att, hit = meeting
    gam = last_meeting_all(hit)
    np.testing.assert_array_equal(gam.gamma[3], np.ones(att.level(3).size))


def test_two_cycle_residue(two_cycle):
    sg, att, hit = build(two_cycle, 0, 2, 0.01)
    gam = last_meeting_all(hit)
    compute_residues(sg, att, gam)
    assert gam.value(att, 1, 1) == pytest.approx(0.4, abs=1e-12)
    assert att.residue(1, 1) == pytest.approx(SQRT_C * 0.4, abs=1e-12)
    assert att.residue(2, 0) == pytest.approx(0.6, abs=1e-12)


def test_negative_rho_is_reported(meeting):
    _, _, hit = meeting
    dense = hit.attention_rows(1).copy()
    dense[:, -1] = 0.0
    hit._dense[1] = dense
    with pytest.raises(ConsistencyError):
        first_meeting_level(hit, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 14), st.floats(0.1, 0.45), st.integers(0, 10 ** 6),
       st.integers(2, 4), st.floats(0.03, 0.3))
def test_random_against_enumeration(n, p, seed, L, eps_h):
    g = random_digraph(n, p, seed, self_loops=True)
    sg, att, hit = build(g, 0, L, eps_h)
    if sg.n_occurrences > 30:
        return
    attention = {(lv, w) for lv, w, _ in att.occurrences()}
    for level in range(1, sg.L + 1):
        for w in sg.nodes[level]:
            w = int(w)
            paths = brute_force_confined_hitting(sg, level, w)
            for (lv, t), val in paths.items():
                if (lv, t) in attention:
                    assert hit.value(level, w, lv, t) == pytest.approx(val, abs=1e-12)
    gam = last_meeting_all(hit)
    for lv, w, _ in att.occurrences():
        expect = brute_force_first_meeting(sg, attention, lv, w)
        got = first_meeting(hit, lv, w)
        for key in expect.keys() | got.keys():
            assert abs(got.get(key, 0.0) - expect.get(key, 0.0)) <= 1e-9
        assert -1e-12 <= gam.value(att, lv, w) <= 1 + 1e-12
