# tests/test_spectrum.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acyclic.errors import InvalidTolerance
from acyclic.model.forest import WeightedForest, induced_matrix, laplacian_forest
from acyclic.services.spectrum import (
    eigenvalues,
    gershgorin_interval,
    inertia_below,
    inertia_counts,
    multiplicity,
)
from verification.generators import broom, path_forest, random_forest, random_tree, spider, star_forest

TOL = 1e-10
SQRT2, SQRT3 = math.sqrt(2.0), math.sqrt(3.0)


def _below(F, x):
    return int(np.sum(np.linalg.eigvalsh(induced_matrix(F)) < x))


# ---------- inertia ----------
@pytest.mark.parametrize("x,expected", [(4.0, 0), (6.0, 1)])
def test_single_vertex_inertia(x, expected):
    F = WeightedForest(1, (5.0,))
    assert inertia_below(F, x).below == expected
    assert inertia_counts(F, [x])[0] == expected


def test_path_inertia():
    F = path_forest(3)
    assert inertia_below(F, 0.0).below == 1
    assert inertia_below(F, 10.0).below == 3
    assert inertia_below(F, 0.0).at_or_above == 2


@pytest.mark.parametrize(
    "F,points",
    [
        (path_forest(3), (-1.0, 0.0, 1.0)),
        (path_forest(5), (-1.0, 0.0, 1.0)),
        (star_forest(3), (0.0,)),
        (star_forest(5), (-1.0, 0.0, 1.0)),
        (spider(3, 2), (-1.0, 0.0, 1.0)),
        (broom(4, 3), (-1.0, 0.0, 1.0)),
        (WeightedForest(4, (0.0, 1.0, 0.0, 1.0), ((0, 1, 1.0), (0, 2, 1.0), (2, 3, 1.0))), (0.0, 1.0)),
    ],
)
def test_zero_pivots_agree_with_dense_count(F, points):
    values = np.linalg.eigvalsh(induced_matrix(F))
    for x in points:
        # x may sit exactly on an eigenvalue; only strict inequality counts
        expected = int(np.sum(values < x - 1e-9))
        assert inertia_below(F, x).below == expected, x
        assert inertia_counts(F, [x])[0] == expected, x


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 60))
def test_vectorised_inertia_matches_scalar(seed, n):
    rng = np.random.default_rng(seed)
    F = random_forest(rng, n, trees=int(rng.integers(1, 4)))
    xs = rng.uniform(-4.0, 4.0, size=17)
    scalar = [inertia_below(F, x).below for x in xs]
    assert inertia_counts(F, xs).tolist() == scalar


def test_inertia_matches_dense_count_on_random_trees():
    rng = np.random.default_rng(1)
    for _ in range(20):
        F = random_tree(rng, int(rng.integers(2, 40)))
        values = np.linalg.eigvalsh(induced_matrix(F))
        for x in rng.uniform(-4.0, 4.0, size=10):
            if np.min(np.abs(values - x)) < 1e-8:
                continue
            assert inertia_below(F, x).below == _below(F, x)


def _unit_tree(rng, n):
    F = random_tree(rng, n, vertex_weights=False)
    return WeightedForest(n, (0.0,) * n, tuple((u, v, 1.0) for u, v, _ in F.edges))


def test_zero_pivots_at_exact_eigenvalues_of_random_trees():
    # unit weights put 0 and +-1 exactly on the spectrum of many trees
    rng = np.random.default_rng(13)
    pairs = 0
    while pairs < 1000:
        F = _unit_tree(rng, int(rng.integers(2, 31)))
        values = np.linalg.eigvalsh(induced_matrix(F))
        exact = [x for x in (-1.0, 0.0, 1.0) if np.min(np.abs(values - x)) < 1e-9]
        if not exact:
            continue
        counts = inertia_counts(F, exact).tolist()
        for x, vectorised in zip(exact, counts):
            expected = int(np.sum(values < x - 1e-9))
            assert inertia_below(F, x).below == expected, (F, x)
            assert vectorised == expected, (F, x)
            pairs += 1


def test_inertia_counts_empty_forest():
    assert inertia_counts(WeightedForest(0), [0.0, 1.0]).tolist() == [0, 0]


# ---------- gershgorin ----------
def test_gershgorin_interval():
    assert gershgorin_interval(WeightedForest(1, (2.0,))) == (2.0, 2.0)
    assert gershgorin_interval(path_forest(3)) == (-2.0, 2.0)
    assert gershgorin_interval(WeightedForest(2, (), ((0, 1, -3.0),))) == (-3.0, 3.0)


# ---------- eigenvalues ----------
def test_path_spectrum():
    spectrum = eigenvalues(path_forest(3), TOL)
    assert [p.multiplicity for p in spectrum] == [1, 1, 1]
    np.testing.assert_allclose(spectrum.values, [-SQRT2, 0.0, SQRT2], atol=1e-12)


def test_star_spectrum():
    spectrum = eigenvalues(star_forest(3), TOL)
    assert [p.multiplicity for p in spectrum] == [1, 2, 1]
    np.testing.assert_allclose(spectrum.values, [-SQRT3, 0.0, SQRT3], atol=1e-12)
    assert spectrum.diagnostics == ()


def test_single_vertex_spectrum():
    spectrum = eigenvalues(WeightedForest(1, (-0.25,)), TOL)
    assert len(spectrum) == 1
    assert spectrum.values[0] == pytest.approx(-0.25, abs=1e-14)
    assert spectrum.pairs[0].multiplicity == 1


def test_empty_spectrum():
    assert len(eigenvalues(WeightedForest(0), TOL)) == 0


def test_spider_multiplicities():
    # legs of two vertices on a centre: -2, -1 (x2), 0, 1 (x2), 2
    spectrum = eigenvalues(spider(3, 2), TOL)
    assert [p.multiplicity for p in spectrum] == [1, 2, 1, 2, 1]
    np.testing.assert_allclose(spectrum.values, [-2.0, -1.0, 0.0, 1.0, 2.0], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_random_spectrum_matches_dense(seed):
    rng = np.random.default_rng(seed)
    F = random_forest(rng, 60, trees=3)
    spectrum = eigenvalues(F, TOL)
    expanded = spectrum.expanded()
    assert len(expanded) == F.n
    reference = np.linalg.eigvalsh(induced_matrix(F))
    assert np.max(np.abs(expanded - reference)) <= 1e-9 * max(1.0, F.inf_norm)


def test_laplacian_of_star_has_multiple_one():
    spectrum = eigenvalues(laplacian_forest(star_forest(4)), TOL)
    # 0, 1 (x3), 5
    assert [p.multiplicity for p in spectrum] == [1, 3, 1]
    np.testing.assert_allclose(spectrum.values, [0.0, 1.0, 5.0], atol=1e-12)


def test_multiplicity():
    assert multiplicity(star_forest(3), 0.0, TOL) == 2
    assert multiplicity(path_forest(3), 1.0, TOL) == 0
    assert multiplicity(WeightedForest(1, (3.0,)), 3.0, TOL) == 1


@pytest.mark.parametrize("tol", [0.0, -1e-3])
def test_invalid_tolerance(tol):
    with pytest.raises(InvalidTolerance):
        eigenvalues(path_forest(3), tol)
    with pytest.raises(InvalidTolerance):
        multiplicity(path_forest(3), 0.0, tol)
