import numpy as np
import pytest

from seqpred.core import all_sequences
from seqpred.graphopt import (
    EdgeListError,
    RelaxedSet,
    WeightedGraph,
    build_laplacian,
    cut_value,
    exact_distance_bruteforce,
    linear_max_relaxed,
    min_cut_quadratic,
    quad_values,
    rademacher_relaxed,
    relaxed_distance,
    relaxed_graph_phi,
    spectral_rad_bound,
)


def path_graph(n, w=1.0):
    return WeightedGraph(n, tuple((i, i + 1, w) for i in range(n - 1)))


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph(3, ((0, 0, 1.0),))
    with pytest.raises(ValueError):
        WeightedGraph(3, ((0, 1, 1.0), (1, 0, 0.5)))
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 1, 1.5),))
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 2, 1.0),))


def test_edge_list_parsing():
    g = WeightedGraph.from_edge_list("""
        # a path with a weighted rung
        n 4
        0 1
        1 2 0.5
        2 3 -0.25
    """)
    assert g.n == 4
    assert (1, 2, 0.5) in g.edges
    assert (2, 3, -0.25) in g.edges


def test_edge_list_errors_carry_line_numbers():
    with pytest.raises(EdgeListError, match="line 2"):
        WeightedGraph.from_edge_list("0 1\nbogus line here\n")
    with pytest.raises(EdgeListError, match="header"):
        WeightedGraph.from_edge_list("0 1\nn 4\n")
    with pytest.raises(EdgeListError):
        WeightedGraph.from_edge_list("# nothing\n")


def test_laplacian_properties():
    g = path_graph(4)
    L = build_laplacian(g)
    assert np.allclose(L, L.T)
    assert np.allclose(L.sum(axis=1), 0.0)
    assert np.allclose(np.diag(L), [1, 2, 2, 1])
    # cut value = 4 x (edges crossing the split)
    assert cut_value(L, [1, 1, -1, -1]) == pytest.approx(4.0)
    assert cut_value(L, [1, -1, 1, -1]) == pytest.approx(12.0)


def test_laplacian_negative_weights_use_absolute_degree():
    g = WeightedGraph(2, ((0, 1, -1.0),))
    L = build_laplacian(g)
    assert np.allclose(L, [[1, 1], [1, 1]])
    assert np.linalg.eigvalsh(L)[0] >= -1e-12


def test_relaxed_set_validation():
    L = build_laplacian(path_graph(3))
    with pytest.raises(ValueError):
        RelaxedSet(L, -1.0)
    with pytest.raises(ValueError):
        RelaxedSet(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_indefinite_laplacian_rejected_by_solver():
    M = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3, -1
    with pytest.raises(ValueError, match="indefinite"):
        linear_max_relaxed(RelaxedSet(M, 1.0), np.array([[1.0, 1.0]]))


def test_single_edge_distances():
    L = build_laplacian(WeightedGraph(2, ((0, 1, 1.0),)))
    # kappa=0: the relaxation pins w to the diagonal
    assert relaxed_distance(RelaxedSet(L, 0.0), [1, -1], tol=1e-9).distance == pytest.approx(0.5, abs=1e-4)
    assert relaxed_distance(RelaxedSet(L, 0.0), [1, 1], tol=1e-9).distance == pytest.approx(0.0, abs=1e-9)
    # kappa=2: |w1 - w2| <= sqrt(2)
    d = relaxed_distance(RelaxedSet(L, 2.0), [1, -1], tol=1e-8)
    assert d.distance == pytest.approx(0.5 - np.sqrt(2) / 4, abs=1e-5)
    assert d.converged
    assert np.all(np.abs(d.w) <= 1.0)
    assert d.quad <= 2.0 + 1e-6 * 2


def test_relaxed_never_exceeds_exact():
    rng = np.random.default_rng(2)
    n = 6
    edges = tuple((u, v, float(rng.uniform(0.1, 1)))
                  for u in range(n) for v in range(u + 1, n) if rng.random() < 0.6)
    L = build_laplacian(WeightedGraph(n, edges))
    kappa = float(np.median(quad_values(L, all_sequences(n, 2).astype(float))))
    rset = RelaxedSet(L, kappa)
    for y in all_sequences(n, 2):
        assert relaxed_distance(rset, y).distance <= exact_distance_bruteforce(rset, y) + 1e-9


def test_bruteforce_empty_set_is_infinite():
    L = build_laplacian(WeightedGraph(2, ((0, 1, 1.0),)))
    # every sign vector has quad 0 or 4; an impossible budget below 0 never occurs,
    # so shift the Laplacian up to force emptiness
    rset = RelaxedSet(L + np.eye(2), 1.0)
    assert exact_distance_bruteforce(rset, [1, 1]) == float("inf")


def test_min_cut_quadratic():
    L = build_laplacian(path_graph(5))
    assert min_cut_quadratic(L) == pytest.approx(0.0, abs=1e-12)


def test_spectral_bound_single_edge_closed_form():
    L = build_laplacian(WeightedGraph(2, ((0, 1, 1.0),)))
    assert spectral_rad_bound(RelaxedSet(L, 4.0)) == pytest.approx(np.sqrt(6) / 4, abs=1e-12)


def test_spectral_bound_dominates_exhaustive_rad():
    rng = np.random.default_rng(3)
    for _ in range(5):
        n = int(rng.integers(3, 7))
        edges = tuple((u, v, float(rng.uniform(0.2, 1)))
                      for u in range(n) for v in range(u + 1, n) if rng.random() < 0.7)
        if not edges:
            continue
        L = build_laplacian(WeightedGraph(n, edges))
        kappa = float(np.quantile(quad_values(L, all_sequences(n, 2).astype(float)), 0.4)) + 0.1
        rset = RelaxedSet(L, kappa)
        rad = rademacher_relaxed(rset).value
        assert rad <= spectral_rad_bound(rset) + 1e-9


def test_solver_batch_matches_scalar():
    L = build_laplacian(path_graph(4, 0.8))
    rset = RelaxedSet(L, 1.5)
    Y = all_sequences(4, 2).astype(float)
    obj, W, conv = linear_max_relaxed(rset, Y, tol=1e-8)
    assert conv.all()
    for y, o in zip(Y, obj):
        assert relaxed_distance(rset, y, tol=1e-8).distance == pytest.approx(0.5 - o / 8, abs=1e-7)


def test_relaxed_graph_phi_stable_and_consistent():
    from seqpred.core import check_stability
    from seqpred.philib import PenaltyConstant

    L = build_laplacian(path_graph(4))
    rset = RelaxedSet(L, 4.0)
    phi = relaxed_graph_phi(rset, PenaltyConstant(0.2), tol=1e-8)
    rep = check_stability(phi)
    assert rep.max_violation <= 1e-6
    y = np.array([1, 1, -1, -1])
    assert phi(y) == pytest.approx(relaxed_distance(rset, y, tol=1e-8).distance + 0.2, abs=1e-9)
