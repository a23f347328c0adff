# tests/test_oracle.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from acyclic.errors import InputError, TooLarge, ZeroVector
from acyclic.model.forest import WeightedForest, induced_matrix
from acyclic.oracle.checks import (
    char_poly_identity_residual,
    derivative_identity_residual,
    edge_identity_residual,
    recurrence_identity_residual,
    residual,
    summation_identity_residual,
)
from acyclic.oracle.closed_forms import (
    path_adjacency_eigenpairs,
    path_laplacian_determinant_identity,
    path_laplacian_eigenpairs,
    path_product_identity,
)
from acyclic.oracle.enumeration import (
    MAX_GRAPH,
    WeightedGraph,
    enumerate_matchings,
    enumerate_paths,
    hl_identity_residual,
    iter_matchings,
    matching_poly_by_enumeration,
)
from acyclic.oracle.jacobi import jacobi_eigen
from acyclic.services.polynomial import phi_eval
from acyclic.services.spectrum import eigenvalues
from acyclic.services.star_sets import find_root_vertex
from verification.generators import path_forest, path_laplacian, random_forest, random_graph, random_tree

SQRT2 = math.sqrt(2.0)


def _cycle(n, weight=1.0):
    return WeightedGraph(n, (), tuple((i, (i + 1) % n, weight) for i in range(n)))


def _complete(n):
    return WeightedGraph(n, (), tuple((i, j, 1.0) for i in range(n) for j in range(i + 1, n)))


# ---------- jacobi ----------
def test_jacobi_diagonal():
    values, vectors = jacobi_eigen(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_array_equal(values, [-1.0, 2.0, 3.0])
    np.testing.assert_array_equal(np.abs(vectors), np.eye(3)[:, [1, 2, 0]])


def test_jacobi_two_by_two():
    values, _ = jacobi_eigen([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(values, [-1.0, 1.0], atol=1e-15)


def test_jacobi_path():
    values, _ = jacobi_eigen(induced_matrix(path_forest(3)))
    np.testing.assert_allclose(values, [-SQRT2, 0.0, SQRT2], atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10.0, 10.0)))
def test_jacobi_decomposes_symmetric_matrices(raw):
    M = raw + raw.T
    values, V = jacobi_eigen(M)
    scale = max(1.0, float(np.linalg.norm(M)))
    np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(M @ V, V * values, atol=1e-11 * scale)
    np.testing.assert_allclose(values, np.linalg.eigvalsh(M), atol=1e-11 * scale)


def test_jacobi_rejects_bad_input():
    with pytest.raises(InputError):
        jacobi_eigen(np.zeros((2, 3)))
    with pytest.raises(InputError):
        jacobi_eigen([[0.0, 1.0], [2.0, 0.0]])


# ---------- matchings ----------
def test_matchings_of_complete_graph():
    K4 = _complete(4)
    assert enumerate_matchings(K4, 0) == 1.0
    assert enumerate_matchings(K4, 1) == 6.0
    assert enumerate_matchings(K4, 2) == 3.0
    assert len(list(iter_matchings(K4))) == 10


def test_matching_poly_of_four_cycle():
    C4 = _cycle(4)
    for x in (-1.5, 0.0, 0.5, 2.0):
        assert matching_poly_by_enumeration(C4, x) == pytest.approx(x ** 4 - 4 * x ** 2 + 2)


def test_matching_poly_equals_phi_on_trees():
    rng = np.random.default_rng(2)
    for _ in range(10):
        F = random_forest(rng, int(rng.integers(1, 11)), trees=2)
        G = WeightedGraph.from_forest(F)
        for x in rng.uniform(-2.0, 2.0, size=3):
            assert matching_poly_by_enumeration(G, x) == pytest.approx(phi_eval(F, x).value, rel=1e-9, abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 8), x=st.floats(-3.0, 3.0))
def test_matching_poly_is_the_signed_count_sum(seed, n, x):
    # without vertex weights mu(G, x) = sum_k (-1)^k p(G, k) x^(n - 2k)
    G = random_graph(np.random.default_rng(seed), n, p=0.5, vertex_weights=False)
    terms = [(-1) ** k * enumerate_matchings(G, k) * x ** (n - 2 * k) for k in range(n // 2 + 1)]
    scale = max(1.0, *(abs(t) for t in terms))
    assert abs(matching_poly_by_enumeration(G, x) - sum(terms)) <= 1e-12 * scale * len(list(iter_matchings(G)))


def test_graph_size_cap():
    with pytest.raises(TooLarge):
        WeightedGraph(MAX_GRAPH + 1)


# ---------- paths ----------
def test_paths_stop_at_first_vertex_of_h():
    P4 = WeightedGraph.from_forest(path_forest(4, weight=2.0))
    paths = enumerate_paths(P4, 0, [2])
    assert [p.vertices for p in paths] == [(0, 1, 2)]
    assert paths[0].weight == 4.0
    assert [p.vertices for p in enumerate_paths(P4, 0, [1, 3])] == [(0, 1)]


def test_paths_around_a_cycle():
    paths = enumerate_paths(_cycle(4), 0, [2])
    assert sorted(p.vertices for p in paths) == [(0, 1, 2), (0, 3, 2)]


def test_path_start_inside_h_is_rejected():
    with pytest.raises(InputError):
        enumerate_paths(_cycle(4), 0, [0, 2])


def test_path_identity_on_small_graphs():
    rng = np.random.default_rng(8)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        G = random_graph(rng, n, p=0.5, vertex_weights=bool(rng.integers(2)))
        u = int(rng.integers(n))
        others = [v for v in range(n) if v != u]
        H = rng.choice(others, size=int(rng.integers(1, len(others) + 1)), replace=False).tolist()
        assert hl_identity_residual(G, u, H, float(rng.uniform(-3.0, 3.0))) <= 1e-9


def test_path_identity_on_a_cycle():
    assert hl_identity_residual(_cycle(5, weight=0.7), 0, [2, 3], 1.1) <= 1e-12


# ---------- closed forms ----------
@pytest.mark.parametrize("n", [2, 3, 7, 15])
def test_path_closed_forms_match_dense(n):
    values, vectors = path_adjacency_eigenpairs(n)
    A = induced_matrix(path_forest(n))
    np.testing.assert_allclose(A @ vectors, vectors * values, atol=1e-12)

    values, vectors = path_laplacian_eigenpairs(n)
    L = induced_matrix(path_laplacian(n))
    np.testing.assert_allclose(L @ vectors, vectors * values, atol=1e-12)
    assert min(values) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 5, 9])
def test_trig_identities(n):
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            assert path_product_identity(n, i, k) <= 1e-9
            assert path_laplacian_determinant_identity(n, i, k) <= 1e-9


# ---------- residual checks ----------
def test_residual_of_exact_eigenvector():
    assert residual(path_forest(3), SQRT2, [1.0, SQRT2, 1.0]) < 1e-15
    assert residual(path_forest(3), 1.0, [1.0, 0.0, 0.0]) == pytest.approx(0.5)


def test_residual_on_zero_matrix_uses_unit_norm():
    assert residual(WeightedForest(2), 0.5, [1.0, 0.0]) == 0.5


def test_residual_rejects_zero_vector():
    with pytest.raises(ZeroVector):
        residual(path_forest(3), 0.0, [0.0, 0.0, 0.0])


@pytest.mark.parametrize("seed", range(5))
def test_identities_on_random_forests(seed):
    rng = np.random.default_rng(seed)
    F = random_forest(rng, int(rng.integers(2, 41)), trees=int(rng.integers(1, 3)))
    for x in rng.uniform(-2.0, 2.0, size=5):
        assert char_poly_identity_residual(F, x) <= 1e-7
        assert derivative_identity_residual(F, x) <= 1e-7
        assert recurrence_identity_residual(F, int(rng.integers(F.n)), x) <= 1e-7
        if F.edges:
            u, v, _ = F.edges[int(rng.integers(len(F.edges)))]
            assert edge_identity_residual(F, u, v, x) <= 1e-7


def test_summation_identity_on_a_tree():
    F = random_tree(np.random.default_rng(21), 20)
    for pair in eigenvalues(F, 1e-12):
        u = find_root_vertex(F, pair.value)
        assert summation_identity_residual(F, pair.value, u) <= 1e-7
