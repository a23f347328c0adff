# acyclic/model/forest.py
"""
Acyclic symmetric matrices as weighted forests.

A[v][v] is the vertex weight w(v); a nonzero A[u][v] (u != v) is the weight of
the edge uv. Vertices are 0-based here; file formats and CLI output are 1-based.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse

from acyclic.errors import DuplicateEdge, HasCycle, InputError, NotSymmetric, ZeroEdgeWeight

log = logging.getLogger(__name__)

Edge = Tuple[int, int, float]


@dataclass(frozen=True)
class Orientation:
    """BFS orientation of one or more components.

    `order` lists parents before children. Vertices outside the oriented
    components have parent -1 and depth -1.
    """

    roots: Tuple[int, ...]
    order: Tuple[int, ...]
    parent: Tuple[int, ...]
    parent_weight: Tuple[float, ...]
    children: Tuple[Tuple[int, ...], ...]
    depth: Tuple[int, ...]


@dataclass(frozen=True)
class TreePath:
    vertices: Tuple[int, ...]
    weight: float

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class WeightedForest:
    n: int
    vertex_weight: Tuple[float, ...] = ()
    edges: Tuple[Edge, ...] = ()
    _cache: Dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 0:
            raise InputError(f"vertex count must be >= 0, got {self.n}")
        weights = tuple(float(w) for w in self.vertex_weight) if len(self.vertex_weight) else (0.0,) * self.n
        if len(weights) != self.n:
            raise InputError(f"expected {self.n} vertex weights, got {len(weights)}")
        object.__setattr__(self, "vertex_weight", weights)
        object.__setattr__(self, "edges", _canonical_edges(self.n, self.edges))

    # ---------- derived structure ----------
    @cached_property
    def adjacency(self) -> Tuple[Tuple[Tuple[int, float], ...], ...]:
        adj: List[List[Tuple[int, float]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return tuple(tuple(sorted(nbrs)) for nbrs in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def pendants(self) -> Tuple[int, ...]:
        return tuple(v for v in range(self.n) if len(self.adjacency[v]) == 1)

    @cached_property
    def component_id(self) -> Tuple[int, ...]:
        """Root (lowest index) of the component of every vertex."""
        orient = self.orient()
        comp = [-1] * self.n
        for v in orient.order:
            p = orient.parent[v]
            comp[v] = v if p < 0 else comp[p]
        return tuple(comp)

    @cached_property
    def sparse_adjacency(self) -> sparse.csr_array:
        """Off-diagonal part of A as a CSR matrix."""
        if not self.edges:
            return sparse.csr_array((self.n, self.n))
        u, v, w = (np.asarray(c) for c in zip(*self.edges))
        rows = np.concatenate([u, v]).astype(int)
        cols = np.concatenate([v, u]).astype(int)
        return sparse.csr_array((np.concatenate([w, w]), (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def inf_norm(self) -> float:
        """max_v |w(v)| + sum_z |w(vz)|, i.e. ||A||_inf."""
        if self.n == 0:
            return 0.0
        return max(
            abs(self.vertex_weight[v]) + sum(abs(w) for _, w in self.adjacency[v])
            for v in range(self.n)
        )

    def orient(self, root: Optional[int] = None) -> Orientation:
        """
        BFS orientation. With no root every component is oriented from its
        lowest-index vertex; with a root only that vertex's component is.
        Children are visited in increasing index order.
        """
        key = ("orient", root)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        parent = [-1] * self.n
        pweight = [0.0] * self.n
        depth = [-1] * self.n
        children: List[List[int]] = [[] for _ in range(self.n)]
        order: List[int] = []
        roots: List[int] = []
        starts = range(self.n) if root is None else (root,)
        for r in starts:
            if depth[r] >= 0:
                continue
            roots.append(r)
            depth[r] = 0
            queue = deque([r])
            while queue:
                v = queue.popleft()
                order.append(v)
                for z, w in self.adjacency[v]:
                    if depth[z] < 0:
                        depth[z] = depth[v] + 1
                        parent[z] = v
                        pweight[z] = w
                        children[v].append(z)
                        queue.append(z)
        result = Orientation(
            roots=tuple(roots),
            order=tuple(order),
            parent=tuple(parent),
            parent_weight=tuple(pweight),
            children=tuple(tuple(c) for c in children),
            depth=tuple(depth),
        )
        self._cache[key] = result
        return result


@dataclass(frozen=True)
class SubForest:
    """An induced sub-forest plus the map back to the parent forest."""

    forest: WeightedForest
    vertices: Tuple[int, ...]  # new index -> old index
    parent_n: int

    @cached_property
    def index(self) -> Dict[int, int]:
        """old index -> new index"""
        return {old: new for new, old in enumerate(self.vertices)}

    def lift(self, values: Sequence[float]) -> np.ndarray:
        """Embed per-vertex values into the parent forest, zero elsewhere."""
        out = np.zeros(self.parent_n)
        out[list(self.vertices)] = values
        return out


# ---------- validation ----------
def _canonical_edges(n: int, edges: Iterable) -> Tuple[Edge, ...]:
    seen = {}
    for e in edges:
        u, v, w = int(e[0]), int(e[1]), float(e[2])
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge {u + 1}-{v + 1} references a vertex outside 1..{n}")
        if u == v:
            raise InputError(f"self-loop at vertex {u + 1}: diagonal entries are vertex weights")
        if w == 0.0:
            raise ZeroEdgeWeight(u, v)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(*key)
        seen[key] = w
    _check_acyclic(n, list(seen))
    return tuple((u, v, w) for (u, v), w in sorted(seen.items()))


def _check_acyclic(n: int, pairs: List[Tuple[int, int]]) -> None:
    root = list(range(n))

    def find(a: int) -> int:
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru == rv:
            raise HasCycle(find_cycle(n, pairs))
        root[ru] = rv


def find_cycle(n: int, pairs: Iterable[Tuple[int, int]]) -> List[int]:
    """Vertex list of some cycle of the graph, [] if it is a forest."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(pairs)
    try:
        return [u for u, _ in nx.find_cycle(g)]
    except nx.NetworkXNoCycle:
        return []


# ---------- operations ----------
def from_symmetric_matrix(M) -> WeightedForest:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"matrix must be square, got shape {M.shape}")
    n = M.shape[0]
    bad = np.argwhere(M != M.T)
    if len(bad):
        i, j = (int(t) for t in bad[0])
        raise NotSymmetric(i, j, float(M[i, j]), float(M[j, i]))
    rows, cols = np.nonzero(np.triu(M, k=1))
    edges = [(int(i), int(j), float(M[i, j])) for i, j in zip(rows, cols)]
    return WeightedForest(n, tuple(np.diag(M).tolist()), tuple(edges))


def induced_matrix(F: WeightedForest) -> np.ndarray:
    A = np.diag(np.asarray(F.vertex_weight, dtype=float)) if F.n else np.zeros((0, 0))
    for u, v, w in F.edges:
        A[u, v] = A[v, u] = w
    return A


def induced_subforest(F: WeightedForest, keep: Iterable[int]) -> SubForest:
    kept = tuple(sorted(set(keep)))
    index = {old: new for new, old in enumerate(kept)}
    edges = [
        (index[u], index[v], w)
        for u, v, w in F.edges
        if u in index and v in index
    ]
    sub = WeightedForest(len(kept), tuple(F.vertex_weight[v] for v in kept), tuple(edges))
    return SubForest(sub, kept, F.n)


def delete_vertices(F: WeightedForest, S: Iterable[int]) -> SubForest:
    """A - S: the induced forest on V \\ S with its old->new index map."""
    removed = set(S)
    return induced_subforest(F, (v for v in range(F.n) if v not in removed))


def components(F: WeightedForest) -> List[SubForest]:
    groups: Dict[int, List[int]] = {}
    for v, c in enumerate(F.component_id):
        groups.setdefault(c, []).append(v)
    return [induced_subforest(F, groups[c]) for c in sorted(groups)]


def tree_path(F: WeightedForest, u: int, v: int) -> Optional[TreePath]:
    """The unique path u -> v, or None when u and v lie in different trees."""
    if F.component_id[u] != F.component_id[v]:
        return None
    orient = F.orient()
    # walk from the lower index so both directions multiply in the same order
    lo, hi = min(u, v), max(u, v)
    up_u: List[int] = [lo]
    up_v: List[int] = [hi]
    a, b = lo, hi
    while orient.depth[a] > orient.depth[b]:
        a = orient.parent[a]
        up_u.append(a)
    while orient.depth[b] > orient.depth[a]:
        b = orient.parent[b]
        up_v.append(b)
    while a != b:
        a = orient.parent[a]
        b = orient.parent[b]
        up_u.append(a)
        up_v.append(b)
    # up_u ends at the meeting vertex; up_v too, so drop its duplicate
    vertices = up_u + up_v[-2::-1]
    weight = 1.0
    for x, y in zip(vertices, vertices[1:]):
        weight *= orient.parent_weight[x] if orient.parent[x] == y else orient.parent_weight[y]
    if u > v:
        vertices.reverse()
    return TreePath(tuple(vertices), weight)


def laplacian_forest(F: WeightedForest) -> WeightedForest:
    """L = D - A of the edge-weighted forest F: vertex weight sum_z w(vz), edge weight -w(uv).
    Vertex weights of F are ignored."""
    degree = [sum(w for _, w in F.adjacency[v]) for v in range(F.n)]
    return WeightedForest(F.n, tuple(degree), tuple((u, v, -w) for u, v, w in F.edges))
