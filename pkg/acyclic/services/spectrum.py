# acyclic/services/spectrum.py
"""
Eigenvalue location on weighted forests.

Inertia comes from leaf elimination: d(v) = w(v) - x, then children before
parents d(p) -= w(pv)^2 / d(v). The number of negative d(v) is the number of
eigenvalues below x (Sylvester). Bisection on that count isolates every
eigenvalue; all brackets advance together through `inertia_counts`.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from acyclic.errors import InvalidTolerance
from acyclic.model.forest import WeightedForest

log = logging.getLogger(__name__)

MAX_BISECTIONS = 200
CLUSTER_FACTOR = 1e3
SHIFT_FACTOR = 10.0
CHUNK = 512
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Inertia:
    below: int
    at_or_above: int


class EigenPair(NamedTuple):
    value: float
    multiplicity: int


@dataclass(frozen=True)
class Spectrum:
    pairs: Tuple[EigenPair, ...]
    tol: float
    diagnostics: Tuple[str, ...] = field(default=())

    def __iter__(self) -> Iterator[EigenPair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def values(self) -> List[float]:
        return [p.value for p in self.pairs]

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, ascending."""
        return np.repeat([p.value for p in self.pairs], [p.multiplicity for p in self.pairs]).astype(float)


def shift_width(lam: float, tol: float) -> float:
    return SHIFT_FACTOR * tol * max(1.0, abs(lam))


def cluster_width(lam: float, tol: float) -> float:
    return CLUSTER_FACTOR * tol * max(1.0, abs(lam))


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise InvalidTolerance(tol)


# ---------- inertia ----------
def inertia_below(F: WeightedForest, x: float) -> Inertia:
    """
    Count of eigenvalues strictly below x, one elimination pass per tree.

    Zero pivot: when a child c has d(c) == 0, the first such child gets d(c) = 2,
    its parent p gets d(p) = -w(pc)^2 / 2 and p stops contributing to its own
    parent. Remaining zero children stay 0.
    """
    orient = F.orient()
    pw = orient.parent_weight
    d = [w - x for w in F.vertex_weight]
    detached = [False] * F.n
    for v in reversed(orient.order):
        zero_kid = -1
        acc = 0.0
        for c in orient.children[v]:
            if detached[c]:
                continue
            if d[c] == 0.0:
                if zero_kid < 0:
                    zero_kid = c
                continue
            acc += pw[c] * pw[c] / d[c]
        if zero_kid >= 0:
            d[zero_kid] = 2.0
            d[v] = -pw[zero_kid] * pw[zero_kid] / 2.0
            detached[v] = True
            log.debug("zero pivot at vertex %d, x=%r", zero_kid + 1, x)
        else:
            d[v] -= acc
    below = sum(1 for t in d if t < 0.0)
    return Inertia(below, F.n - below)


def _levels(F: WeightedForest) -> List[np.ndarray]:
    """Non-root vertices grouped by depth, deepest first, each level sorted by index."""
    cached = F._cache.get("levels")
    if cached is not None:
        return cached
    orient = F.orient()
    depth = np.asarray(orient.depth)
    levels = [np.flatnonzero(depth == k) for k in range(int(depth.max(initial=0)), 0, -1)]
    F._cache["levels"] = levels
    return levels


def _inertia_chunk(F: WeightedForest, xs: np.ndarray) -> np.ndarray:
    orient = F.orient()
    parent = np.asarray(orient.parent)
    w2 = np.asarray(orient.parent_weight) ** 2
    m = len(xs)
    d = np.asarray(F.vertex_weight, dtype=float)[:, None] - xs[None, :]
    detached = np.zeros((F.n, m), dtype=bool)
    cols = np.arange(m)
    for kids in _levels(F):
        parents, slot = np.unique(parent[kids], return_inverse=True)
        dk = d[kids]
        active = ~detached[kids]
        zero = active & (dk == 0.0)
        live = active & ~zero
        terms = np.divide(w2[kids][:, None], dk, out=np.zeros_like(dk), where=live)
        acc = np.zeros((len(parents), m))
        np.add.at(acc, slot, terms)
        # lowest zero child per (parent, shift); kids are sorted so row order is index order
        first = np.full((len(parents), m), len(kids))
        np.minimum.at(first, slot, np.where(zero, np.arange(len(kids))[:, None], len(kids)))
        hit = first < len(kids)
        d[parents] = np.where(hit, 0.0, d[parents] - acc)
        if hit.any():
            pi, ci = np.nonzero(hit)
            j = first[pi, ci]
            d[kids[j], cols[ci]] = 2.0
            d[parents[pi], cols[ci]] = -w2[kids[j]] / 2.0
            detached[parents[pi], cols[ci]] = True
            log.debug("zero pivot at %d (vertex, shift) pairs", len(pi))
    return (d < 0.0).sum(axis=0)


def inertia_counts(F: WeightedForest, xs: Sequence[float]) -> np.ndarray:
    """Vectorised inertia_below(F, x).below for many shifts at once."""
    xs = np.asarray(xs, dtype=float).ravel()
    if F.n == 0:
        return np.zeros(len(xs), dtype=int)
    out = np.empty(len(xs), dtype=int)
    for start in range(0, len(xs), CHUNK):
        out[start:start + CHUNK] = _inertia_chunk(F, xs[start:start + CHUNK])
    return out


def gershgorin_interval(F: WeightedForest) -> Tuple[float, float]:
    if F.n == 0:
        return 0.0, 0.0
    radius = [sum(abs(w) for _, w in F.adjacency[v]) for v in range(F.n)]
    lo = min(w - r for w, r in zip(F.vertex_weight, radius))
    hi = max(w + r for w, r in zip(F.vertex_weight, radius))
    return lo, hi


# ---------- bisection ----------
def _bisect_all(F: WeightedForest) -> Tuple[np.ndarray, bool]:
    """
    For k = 1..n find a bracket (a, b] with count(a) < k <= count(b), shrunk
    to a few ulps. Returns the midpoints and whether the budget ran out.
    """
    lo, hi = gershgorin_interval(F)
    pad = 1e-6 * max(1.0, abs(lo), abs(hi))
    a = np.full(F.n, lo - pad)
    b = np.full(F.n, hi + pad)
    span = b[0] - a[0]
    k = np.arange(1, F.n + 1)
    for it in range(MAX_BISECTIONS):
        mid = 0.5 * (a + b)
        open_ = (b - a > 4 * EPS * np.maximum(np.abs(a), np.abs(b)) + EPS * span) & (mid > a) & (mid < b)
        if not open_.any():
            log.debug("bisection finished after %d rounds", it)
            return 0.5 * (a + b), False
        # brackets shared by a multiple eigenvalue are tested once
        points, where = np.unique(mid[open_], return_inverse=True)
        counts = inertia_counts(F, points)[where]
        idx = np.flatnonzero(open_)
        up = counts >= k[idx]
        b[idx[up]] = mid[idx[up]]
        a[idx[~up]] = mid[idx[~up]]
    log.warning("bisection budget of %d rounds exhausted", MAX_BISECTIONS)
    return 0.5 * (a + b), True


def eigenvalues(F: WeightedForest, tol: float) -> Spectrum:
    """All eigenvalues with multiplicities; eigenvalues closer than the cluster width merge."""
    _check_tol(tol)
    if F.n == 0:
        return Spectrum((), tol)
    lams, exhausted = _bisect_all(F)
    lams = np.sort(lams)
    diagnostics: List[str] = []
    if exhausted:
        diagnostics.append(f"bisection budget of {MAX_BISECTIONS} iterations exhausted")

    clusters: List[List[float]] = [[float(lams[0])]]
    for lam in lams[1:]:
        lam = float(lam)
        if lam - clusters[-1][-1] <= cluster_width(lam, tol):
            clusters[-1].append(lam)
        else:
            clusters.append([lam])

    lows = [c[0] - shift_width(c[0], tol) for c in clusters]
    highs = [c[-1] + shift_width(c[-1], tol) for c in clusters]
    counts = inertia_counts(F, lows + highs)
    pairs: List[EigenPair] = []
    for i, members in enumerate(clusters):
        value = math.fsum(members) / len(members)
        jump = int(counts[len(clusters) + i] - counts[i])
        if jump != len(members):
            diagnostics.append(
                f"inertia jump {jump} differs from cluster size {len(members)} near {value!r}"
            )
            log.warning(diagnostics[-1])
        pairs.append(EigenPair(value, len(members)))
    return Spectrum(tuple(pairs), tol, tuple(diagnostics))


def multiplicity(F: WeightedForest, lam: float, tol: float) -> int:
    """Inertia jump across [lam - delta, lam + delta]; 0 means lam is not an eigenvalue."""
    _check_tol(tol)
    delta = shift_width(lam, tol)
    lo, hi = inertia_counts(F, [lam - delta, lam + delta])
    return int(hi - lo)
