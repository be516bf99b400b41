import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from _oracles import random_digraph
from simpush import ExactSimRank, MonteCarloSimRank, SimPush
from simpush.estimator import check_graph, check_nodes


def test_params_round_trip():
    est = SimPush(c=0.5, eps=0.05, random_state=3)
    assert est.get_params() == {"c": 0.5, "eps": 0.05, "delta": 1e-4, "random_state": 3}
    twin = clone(est).set_params(eps=0.01)
    assert twin.eps == 0.01 and est.eps == 0.05


def test_fit_transform_matches_exact():
    g = random_digraph(40, 0.1, seed=7)
    S = ExactSimRank().fit(g).transform([1, 2])
    est = SimPush(eps=0.05).fit(g)
    rows = est.transform([1, 2])
    assert rows.shape == (2, 40)
    assert np.all(S - rows <= 0.05)
    assert np.all(rows <= S + 1e-7)
    assert est.query(1).L >= 1


def test_monte_carlo_estimator():
    g = random_digraph(20, 0.2, seed=2)
    S = ExactSimRank().fit(g).transform([0])
    mc = MonteCarloSimRank(n_samples=50_000).fit(g).transform([0])
    assert np.abs(S - mc).max() < 0.02
    assert MonteCarloSimRank().fit(g).transform(np.array([], dtype=int)).shape == (0, 20)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        SimPush().transform([0])


@pytest.mark.parametrize("X", [
    np.array([[0, 1], [1, 2]]),
    sp.csr_matrix(np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])),
    np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=bool),
])
def test_graph_inputs(X):
    g = check_graph(X)
    assert (g.n, g.m) == (3, 2)


def test_graph_input_errors():
    with pytest.raises(ValueError):
        check_graph(np.array([[0.5, 1.0], [1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        check_graph(np.zeros((2, 3, 4)))


def test_node_validation():
    assert check_nodes(3, 5).tolist() == [3]
    for bad in ([5], [-1], [0.5], [[1]]):
        with pytest.raises(ValueError):
            check_nodes(bad, 5)
