# tests/test_batched.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import acyclic.services.batched as batched
from acyclic.errors import InputError
from acyclic.model.forest import WeightedForest, induced_matrix
from acyclic.oracle.checks import residuals
from acyclic.services.batched import simple_eigenvectors
from acyclic.services.eigenvectors import full_eigendecomposition, simple_eigenvector
from acyclic.services.polynomial import deleted_vertex_values_scaled
from acyclic.services.spectrum import eigenvalues
from acyclic.services.star_sets import find_root_vertex
from verification.generators import example_tree, path_forest, random_forest, random_tree, spider, star_forest

TOL = 1e-12


def _simple_values(F):
    return [p.value for p in eigenvalues(F, TOL) if p.multiplicity == 1]


def _same_column(batch, j, vec):
    """Column j of the batch equals the scalar vector, both scaled to max-abs 1."""
    col = batch.entries[:, j]
    np.testing.assert_allclose(col / np.max(np.abs(col)), vec.entries / np.max(np.abs(vec.entries)), rtol=1e-9, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 45))
def test_matches_scalar_eigenvectors(seed, n):
    F = random_tree(np.random.default_rng(seed), n)
    lams = _simple_values(F)
    batch = simple_eigenvectors(F, lams)
    for j, lam in enumerate(lams):
        u = find_root_vertex(F, lam)
        assert batch.roots[j] == u
        _same_column(batch, j, simple_eigenvector(F, lam, u))


@pytest.mark.parametrize("F", [example_tree(), spider(3, 4), path_forest(9)], ids=["example", "spider", "path"])
def test_named_trees(F):
    lams = _simple_values(F)
    batch = simple_eigenvectors(F, lams)
    for j, lam in enumerate(lams):
        u = find_root_vertex(F, lam)
        assert batch.roots[j] == u
        _same_column(batch, j, simple_eigenvector(F, lam, u))
    assert np.max(residuals(F, batch.lams, batch.entries)) <= 1e-9


def test_certificate_is_the_deleted_value():
    F = random_tree(np.random.default_rng(4), 30)
    lams = _simple_values(F)
    batch = simple_eigenvectors(F, lams)
    for j, lam in enumerate(lams):
        u = int(batch.roots[j])
        expected = deleted_vertex_values_scaled(F, lam)[u]
        assert batch.certificate_log2[j] == pytest.approx(expected.log2abs(), rel=1e-10, abs=1e-10)
        assert batch.certificate[j] == pytest.approx(expected.value(), rel=1e-9)
        # alpha(u) = phi(A - u, lambda)
        assert batch.entries[u, j] * 2.0 ** batch.exponents[j] == pytest.approx(expected.value(), rel=1e-9)


def test_star_with_zero_subtree_values():
    # K_{1,4} at its simple eigenvalues +-2
    F = star_forest(4)
    batch = simple_eigenvectors(F, [-2.0, 2.0])
    values, vectors = np.linalg.eigh(induced_matrix(F))
    for j, k in enumerate([0, 4]):
        col = batch.entries[:, j]
        assert abs(col @ vectors[:, k]) / np.linalg.norm(col) == pytest.approx(1.0, abs=1e-12)


def test_unit_weight_tree_at_zero():
    # exact zeros in subtree values: P5 at 0 has f(leaf) = 0
    F = path_forest(5)
    batch = simple_eigenvectors(F, [0.0])
    np.testing.assert_allclose(batch.entries[:, 0] / batch.entries[0, 0], [1.0, 0.0, -1.0, 0.0, 1.0], atol=1e-15)
    assert batch.roots[0] == 0


def test_large_values_keep_an_exponent():
    F = path_forest(700, weight=4.0)
    lams = _simple_values(F)[::50]
    batch = simple_eigenvectors(F, lams)
    assert np.all(batch.exponents != 0)
    for j, lam in enumerate(lams):
        vec = simple_eigenvector(F, lam, int(batch.roots[j]))
        assert vec.exponent != 0
        _same_column(batch, j, vec)
    assert np.max(residuals(F, batch.lams, batch.entries)) <= 1e-7


def test_chunks_are_stitched_in_order(monkeypatch):
    F = random_tree(np.random.default_rng(8), 23)
    lams = _simple_values(F)
    whole = simple_eigenvectors(F, lams)
    monkeypatch.setattr(batched, "CHUNK", 4)
    pieces = simple_eigenvectors(F, lams)
    np.testing.assert_array_equal(whole.roots, pieces.roots)
    np.testing.assert_allclose(whole.entries, pieces.entries, rtol=1e-12, atol=0.0)


def test_empty_inputs():
    batch = simple_eigenvectors(WeightedForest(0), [1.0])
    assert batch.entries.shape == (0, 0)
    batch = simple_eigenvectors(path_forest(3), [])
    assert batch.entries.shape == (3, 0)


def test_forest_with_two_trees_is_rejected():
    with pytest.raises(InputError):
        simple_eigenvectors(WeightedForest(3, (), ((0, 1, 1.0),)), [1.0])


def test_decomposition_of_a_large_tree():
    F = random_tree(np.random.default_rng(31), 400)
    bases = full_eigendecomposition(F, 1e-10)
    assert sum(b.k for b in bases) == F.n
    assert max(b.residual for b in bases) <= 1e-7
    simple = [b for b in bases if b.k == 1]
    for b in simple[::40]:
        assert b.star_set.vertices == (find_root_vertex(F, b.lam),)
        assert math.isfinite(b.star_set.certificate_log2)
