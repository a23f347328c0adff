# verification/generators.py
"""Random and named weighted forests for tests and the verify command."""
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from acyclic.model.forest import WeightedForest, laplacian_forest
from acyclic.oracle.enumeration import WeightedGraph

WEIGHT_LOW, WEIGHT_HIGH = 0.1, 2.0


def edge_weights(rng: np.random.Generator, m: int) -> np.ndarray:
    """Uniform on [-2, -0.1] U [0.1, 2]."""
    return rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, size=m) * rng.choice([-1.0, 1.0], size=m)


def _vertex_weights(rng: np.random.Generator, n: int, vertex_weights: bool) -> tuple:
    return tuple(rng.uniform(-1.0, 1.0, size=n)) if vertex_weights else (0.0,) * n


def random_tree(rng: np.random.Generator, n: int, vertex_weights: bool = True) -> WeightedForest:
    """Uniform random labelled tree (random Pruefer sequence)."""
    if n <= 0:
        return WeightedForest(0)
    if n == 1:
        return WeightedForest(1, _vertex_weights(rng, 1, vertex_weights))
    if n == 2:
        pairs = [(0, 1)]
    else:
        tree = nx.from_prufer_sequence(rng.integers(0, n, size=n - 2).tolist())
        pairs = list(tree.edges())
    w = edge_weights(rng, len(pairs))
    edges = tuple((int(u), int(v), float(x)) for (u, v), x in zip(pairs, w))
    return WeightedForest(n, _vertex_weights(rng, n, vertex_weights), edges)


def random_forest(rng: np.random.Generator, n: int, trees: int = 2, vertex_weights: bool = True) -> WeightedForest:
    """A random tree with `trees - 1` random edges removed."""
    F = random_tree(rng, n, vertex_weights)
    if len(F.edges) == 0 or trees <= 1:
        return F
    drop = set(rng.choice(len(F.edges), size=min(trees - 1, len(F.edges)), replace=False).tolist())
    return WeightedForest(n, F.vertex_weight, tuple(e for i, e in enumerate(F.edges) if i not in drop))


def path_forest(n: int, weight: float = 1.0) -> WeightedForest:
    return WeightedForest(n, (), tuple((i, i + 1, weight) for i in range(n - 1)))


def path_laplacian(n: int) -> WeightedForest:
    return laplacian_forest(path_forest(n))


def star_forest(m: int, weight: float = 1.0) -> WeightedForest:
    """K_{1,m}: center 0, leaves 1..m."""
    return WeightedForest(m + 1, (), tuple((0, i, weight) for i in range(1, m + 1)))


def spider(legs: int, length: int, weight: float = 1.0) -> WeightedForest:
    """`legs` paths of `length` vertices glued to a center 0."""
    edges = []
    v = 1
    for _ in range(legs):
        prev = 0
        for _ in range(length):
            edges.append((prev, v, weight))
            prev = v
            v += 1
    return WeightedForest(v, (), tuple(edges))


def broom(handle: int, bristles: int, weight: float = 1.0) -> WeightedForest:
    """A path of `handle` vertices whose last vertex carries `bristles` leaves."""
    edges = [(i, i + 1, weight) for i in range(handle - 1)]
    end = handle - 1
    edges += [(end, handle + j, weight) for j in range(bristles)]
    return WeightedForest(handle + bristles, (), tuple(edges))


# 0-based edges of a 10-vertex tree with a branch at 2 and a branch at 6 (1-based)
EXAMPLE_EDGES = ((0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (5, 6), (6, 7), (5, 8), (0, 9))


def example_tree(
    weights: Optional[Sequence[float]] = None,
    vertex_weights: Optional[Sequence[float]] = None,
) -> WeightedForest:
    """
    10-vertex tree with edges 1-2, 2-3, 3-4, 4-5, 2-6, 6-7, 7-8, 6-9, 1-10
    (1-based), weighted in that order.
    """
    ws = weights if weights is not None else (1.0, 2.0, 3.0, 0.5, 1.5, -1.0, 2.5, -0.5, 0.75)
    if len(ws) != len(EXAMPLE_EDGES):
        raise ValueError(f"example tree needs {len(EXAMPLE_EDGES)} edge weights, got {len(ws)}")
    return WeightedForest(
        10,
        tuple(vertex_weights) if vertex_weights is not None else (),
        tuple((u, v, float(w)) for (u, v), w in zip(EXAMPLE_EDGES, ws)),
    )


def random_graph(rng: np.random.Generator, n: int, p: float = 0.4, vertex_weights: bool = True) -> WeightedGraph:
    """Erdos-Renyi graph with random nonzero edge weights (cycles allowed)."""
    g = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
    pairs = list(g.edges())
    w = edge_weights(rng, len(pairs))
    return WeightedGraph(
        n,
        _vertex_weights(rng, n, vertex_weights),
        tuple((int(u), int(v), float(x)) for (u, v), x in zip(pairs, w)),
    )
