# acyclic/oracle/enumeration.py
"""
Brute-force matching and path enumeration on small weighted graphs (cycles allowed).

mu(G, x) = sum over matchings m of (-1)^|m| W(m)^2 prod_{v not covered}(x - w(v)),
evaluated literally. Everything here is exponential; sizes are capped.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Sequence, Tuple

import networkx as nx

from acyclic.errors import InputError, TooLarge, ZeroEdgeWeight
from acyclic.model.forest import Edge, TreePath, WeightedForest

log = logging.getLogger(__name__)

MAX_GRAPH = 16
MAX_IDENTITY = 14


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    vertex_weight: Tuple[float, ...] = ()
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n > MAX_GRAPH:
            raise TooLarge(self.n, MAX_GRAPH, "WeightedGraph")
        weights = tuple(float(w) for w in self.vertex_weight) if len(self.vertex_weight) else (0.0,) * self.n
        if len(weights) != self.n:
            raise InputError(f"expected {self.n} vertex weights, got {len(weights)}")
        seen = {}
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"bad edge {u + 1}-{v + 1}")
            if w == 0.0:
                raise ZeroEdgeWeight(u, v)
            seen[(min(u, v), max(u, v))] = w
        object.__setattr__(self, "vertex_weight", weights)
        object.__setattr__(self, "edges", tuple((u, v, w) for (u, v), w in sorted(seen.items())))

    @classmethod
    def from_forest(cls, F: WeightedForest) -> "WeightedGraph":
        return cls(F.n, F.vertex_weight, F.edges)

    @cached_property
    def adjacency(self) -> Tuple[Tuple[Tuple[int, float], ...], ...]:
        adj: List[List[Tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return tuple(tuple(sorted(a)) for a in adj)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges)
        return g

    def delete(self, S: Iterable[int]) -> "WeightedGraph":
        removed = set(S)
        kept = [v for v in range(self.n) if v not in removed]
        index = {old: new for new, old in enumerate(kept)}
        edges = tuple(
            (index[u], index[v], w) for u, v, w in self.edges if u in index and v in index
        )
        return WeightedGraph(len(kept), tuple(self.vertex_weight[v] for v in kept), edges)


# ---------- matchings ----------
def iter_matchings(G: WeightedGraph) -> Iterator[Tuple[Edge, ...]]:
    """Every matching of G (the empty one included), each exactly once."""
    used = [False] * G.n
    chosen: List[Edge] = []

    def extend(v: int) -> Iterator[Tuple[Edge, ...]]:
        while v < G.n and used[v]:
            v += 1
        if v == G.n:
            yield tuple(chosen)
            return
        yield from extend(v + 1)
        for z, w in G.adjacency[v]:
            if z > v and not used[z]:
                used[v] = used[z] = True
                chosen.append((v, z, w))
                yield from extend(v + 1)
                chosen.pop()
                used[v] = used[z] = False

    return extend(0)


def _weight2(m: Sequence[Edge]) -> float:
    total = 1.0
    for _, _, w in m:
        total *= w * w
    return total


def enumerate_matchings(G: WeightedGraph, k: int) -> float:
    """p(G, k): sum of W(m)^2 over k-matchings; W(empty) = 1."""
    return sum(_weight2(m) for m in iter_matchings(G) if len(m) == k)


def matching_poly_by_enumeration(G: WeightedGraph, x: float) -> float:
    total = 0.0
    for m in iter_matchings(G):
        covered = {u for u, _, _ in m} | {v for _, v, _ in m}
        term = (-1.0) ** len(m) * _weight2(m)
        for v in range(G.n):
            if v not in covered:
                term *= x - G.vertex_weight[v]
        total += term
    return total


# ---------- paths ----------
def enumerate_paths(G: WeightedGraph, u: int, H: Iterable[int]) -> List[TreePath]:
    """Simple paths from u that meet H exactly at their last vertex."""
    H = set(H)
    if u in H:
        raise InputError(f"start vertex {u + 1} must not lie in H")
    g = G.to_networkx()
    paths: List[TreePath] = []
    for h in sorted(H):
        # paths to h may not pass through the rest of H
        view = nx.restricted_view(g, [z for z in H if z != h], [])
        for trail in nx.all_simple_paths(view, u, h):
            weight = 1.0
            for a, b in zip(trail, trail[1:]):
                weight *= g[a][b]["weight"]
            paths.append(TreePath(tuple(trail), weight))
    return paths


def hl_identity_residual(G: WeightedGraph, u: int, H: Iterable[int], x: float) -> float:
    """
    Residual of the path identity

        mu(G-u) mu(G-H) - mu(G) mu(G-u-H) = sum_P W(P)^2 mu(G-P) mu(G-H-P)

    over paths P from u to H that touch H only at the end, normalised by the
    largest term.
    """
    if G.n > MAX_IDENTITY:
        raise TooLarge(G.n, MAX_IDENTITY, "hl_identity_residual")
    H = sorted(set(H))

    seen: Dict[FrozenSet[int], float] = {}

    def mu(S: Iterable[int]) -> float:
        key = frozenset(S)
        if key not in seen:
            seen[key] = matching_poly_by_enumeration(G.delete(key), x)
        return seen[key]

    a = mu([u]) * mu(H)
    b = mu([]) * mu([u, *H])
    terms = []
    for P in enumerate_paths(G, u, H):
        terms.append(P.weight ** 2 * mu(P.vertices) * mu([*H, *P.vertices]))
    scale = max([abs(a), abs(b), *(abs(t) for t in terms), 1e-300])
    return abs(a - b - sum(terms)) / scale
