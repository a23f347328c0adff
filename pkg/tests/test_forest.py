# tests/test_forest.py
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acyclic.errors import DuplicateEdge, HasCycle, InputError, NotSymmetric, ZeroEdgeWeight
from acyclic.model.forest import (
    WeightedForest,
    components,
    delete_vertices,
    find_cycle,
    from_symmetric_matrix,
    induced_matrix,
    laplacian_forest,
    tree_path,
)
from verification.generators import example_tree, path_forest, random_forest, star_forest


def test_single_vertex_from_matrix():
    F = from_symmetric_matrix([[2.5]])
    assert F.n == 1
    assert F.vertex_weight == (2.5,)
    assert F.edges == ()


def test_single_edge_from_matrix():
    F = from_symmetric_matrix([[0.0, -3.0], [-3.0, 0.0]])
    assert F.edges == ((0, 1, -3.0),)
    assert F.vertex_weight == (0.0, 0.0)


def test_triangle_is_rejected():
    with pytest.raises(HasCycle) as exc:
        from_symmetric_matrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert sorted(exc.value.cycle) == [0, 1, 2]
    assert "cycle" in str(exc.value)


def test_non_symmetric_matrix_is_rejected():
    with pytest.raises(NotSymmetric) as exc:
        from_symmetric_matrix([[0, 1], [2, 0]])
    # 1-based in the message
    assert "M[1][2]" in str(exc.value)


def test_non_square_matrix_is_rejected():
    with pytest.raises(InputError):
        from_symmetric_matrix(np.zeros((2, 3)))


def test_matrix_round_trip_on_example_tree():
    F = example_tree(vertex_weights=np.linspace(-1, 1, 10))
    A = induced_matrix(F)
    assert np.array_equal(A, A.T)
    assert from_symmetric_matrix(A) == F


@pytest.mark.parametrize(
    "edges,error",
    [
        (((0, 1, 0.0),), ZeroEdgeWeight),
        (((0, 1, 1.0), (1, 0, 2.0)), DuplicateEdge),
        (((1, 1, 1.0),), InputError),
        (((0, 5, 1.0),), InputError),
        (((0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)), HasCycle),
    ],
)
def test_invalid_edges(edges, error):
    with pytest.raises(error):
        WeightedForest(3, (), edges)


def test_wrong_number_of_vertex_weights():
    with pytest.raises(InputError):
        WeightedForest(3, (1.0, 2.0))


def test_find_cycle_on_forest_is_empty():
    assert find_cycle(4, [(0, 1), (1, 2)]) == []
    assert len(find_cycle(4, [(0, 1), (1, 2), (2, 0)])) == 3


def test_components():
    assert len(components(WeightedForest(2, (), ((0, 1, 1.0),)))) == 1
    assert [c.forest.n for c in components(WeightedForest(2))] == [1, 1]
    F = WeightedForest(4, (), ((0, 1, 1.0), (1, 2, 1.0)))
    assert [c.forest.n for c in components(F)] == [3, 1]
    assert F.component_id == (0, 0, 0, 3)


def test_tree_path_on_path():
    path = tree_path(path_forest(3), 0, 2)
    assert path.vertices == (0, 1, 2)
    assert path.weight == 1.0


def test_tree_path_across_branches():
    F = example_tree()
    assert tree_path(F, 0, 2).vertices == (0, 1, 2)
    assert tree_path(F, 0, 2).weight == pytest.approx(1.0 * 2.0)

    path = tree_path(F, 4, 7)
    assert path.vertices == (4, 3, 2, 1, 5, 6, 7)
    assert path.weight == pytest.approx(0.5 * 3.0 * 2.0 * 1.5 * -1.0 * 2.5)


def test_tree_path_to_itself():
    path = tree_path(example_tree(), 6, 6)
    assert path.vertices == (6,)
    assert path.weight == 1.0


def test_tree_path_reversed_has_equal_weight():
    rng = np.random.default_rng(11)
    for _ in range(200):
        F = random_forest(rng, int(rng.integers(2, 40)), trees=int(rng.integers(1, 4)))
        u, v = (int(t) for t in rng.integers(0, F.n, size=2))
        forward, backward = tree_path(F, u, v), tree_path(F, v, u)
        if forward is None:
            assert backward is None
            continue
        assert backward.vertices == forward.vertices[::-1]
        assert backward.weight == forward.weight
        assert forward.vertices[0] == u and forward.vertices[-1] == v


def test_tree_path_between_components_is_none():
    F = WeightedForest(4, (), ((0, 1, 1.0), (2, 3, 1.0)))
    assert tree_path(F, 0, 3) is None


def test_delete_vertices():
    sub = delete_vertices(path_forest(3), [1])
    assert sub.forest.n == 2
    assert sub.forest.edges == ()
    assert sub.vertices == (0, 2)
    assert sub.index == {0: 0, 2: 1}
    assert list(sub.lift([5.0, 7.0])) == [5.0, 0.0, 7.0]

    assert delete_vertices(path_forest(3), [0, 1, 2]).forest.n == 0


def test_delete_path_from_example_tree():
    sub = delete_vertices(example_tree(), [0, 1, 2])
    assert sub.forest.n == 7
    # 4-5 edge, 6-7-8 / 6-9 branch, isolated 10 (1-based)
    assert len(components(sub.forest)) == 3


def test_orientation_lists_parents_first():
    F = example_tree()
    orient = F.orient(root=4)
    seen = set()
    for v in orient.order:
        p = orient.parent[v]
        assert p < 0 or p in seen
        seen.add(v)
    assert orient.roots == (4,)
    assert orient.depth[4] == 0
    assert orient.depth[7] == 6


def test_orientation_of_forest_has_one_root_per_tree():
    rng = np.random.default_rng(3)
    F = random_forest(rng, 20, trees=4)
    assert len(F.orient().roots) == 4
    assert F.orient().roots == tuple(sorted(set(F.component_id)))


def test_pendants_and_norm():
    F = star_forest(4, weight=-2.0)
    assert F.pendants == (1, 2, 3, 4)
    assert F.degree(0) == 4
    assert F.inf_norm == 8.0
    assert WeightedForest(0).inf_norm == 0.0


def test_laplacian_forest_of_path():
    L = laplacian_forest(path_forest(3))
    assert L.vertex_weight == (1.0, 2.0, 1.0)
    assert L.edges == ((0, 1, -1.0), (1, 2, -1.0))
    assert np.allclose(induced_matrix(L).sum(axis=1), 0.0)


# ---------- random forests ----------
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(0, 40), trees=st.integers(1, 5))
def test_edges_plus_components_is_vertex_count(seed, n, trees):
    F = random_forest(np.random.default_rng(seed), n, trees=trees)
    assert len(F.edges) + len(components(F)) == F.n


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 40), trees=st.integers(1, 4))
def test_matrix_round_trip_on_random_forests(seed, n, trees):
    F = random_forest(np.random.default_rng(seed), n, trees=trees)
    G = from_symmetric_matrix(induced_matrix(F))
    assert G.vertex_weight == F.vertex_weight
    assert G.edges == F.edges
    assert np.array_equal(induced_matrix(G), induced_matrix(F))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 40), cut=st.integers(0, 10))
def test_delete_vertices_stays_acyclic(seed, n, cut):
    rng = np.random.default_rng(seed)
    F = random_forest(rng, n, trees=2)
    S = rng.choice(n, size=min(cut, n), replace=False).tolist()
    sub = delete_vertices(F, S)
    G = sub.forest
    assert G.n == n - len(S)
    assert find_cycle(G.n, [(u, v) for u, v, _ in G.edges]) == []
    assert len(G.edges) + len(components(G)) == G.n
    for a, b, w in G.edges:
        old = tuple(sorted((sub.vertices[a], sub.vertices[b])))
        assert (old[0], old[1], w) in F.edges
