# acyclic/services/batched.py
"""
Simple-eigenvalue eigenvectors of one tree for many eigenvalues at once.

Columns are eigenvalues. The tree is rooted at its lowest-index vertex once
and vertices are handled a depth level (or a sibling rank) at a time, so each
pass costs a few numpy operations per level rather than Python arithmetic per
vertex.

The bottom-up subtree values and the top-down values of the tree above each
vertex need sums, so they keep a power-of-two exponent next to the mantissa
as the scalar polynomial service does. Everything after that is a product and
is carried as (log2|value|, sign, number of zero factors).

For a column with star vertex u, the branch of v pointing towards u is its
parent branch when v is off the u-root path and the child on that path
otherwise; alpha(v) is h(v) times every other branch value at v.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from acyclic.errors import InputError, NoStarVertex
from acyclic.model.forest import WeightedForest
from acyclic.services.star_sets import TIE_THRESHOLD, ZERO_THRESHOLD

log = logging.getLogger(__name__)

CHUNK = 256
_SAFE_LOG2 = 1000
_LOG2_ZERO = math.log2(ZERO_THRESHOLD)
_LOG2_TIE = math.log2(1.0 - TIE_THRESHOLD)


@dataclass(frozen=True)
class _Level:
    """Vertices of one depth, grouped by parent, increasing index inside a group."""

    kids: np.ndarray
    parents: np.ndarray
    rounds: Tuple[np.ndarray, ...]  # positions of the r-th child of every parent
    last: np.ndarray                # position holds the last child of its parent


class LogProduct(NamedTuple):
    """sign * 2**log2 when zeros == 0, else exactly 0."""

    log2: np.ndarray
    sign: np.ndarray
    zeros: np.ndarray

    def __mul__(self, other: "LogProduct") -> "LogProduct":
        return LogProduct(self.log2 + other.log2, self.sign * other.sign, self.zeros + other.zeros)

    def log2abs(self) -> np.ndarray:
        return np.where(self.zeros > 0, -np.inf, self.log2)


@dataclass(frozen=True)
class SimpleBatch:
    """Star vertices, certificates and alpha columns for a batch of eigenvalues."""

    lams: np.ndarray
    roots: np.ndarray
    certificate_log2: np.ndarray
    certificate: np.ndarray
    entries: np.ndarray     # n x m
    exponents: np.ndarray   # true column j is entries[:, j] * 2**exponents[j]


# ---------- tree structure ----------
def _sibling_levels(F: WeightedForest) -> List[_Level]:
    """Non-root levels, shallowest first."""
    cached = F._cache.get("sibling_levels")
    if cached is not None:
        return cached
    orient = F.orient()
    parent = np.asarray(orient.parent)
    depth = np.asarray(orient.depth)
    levels = []
    for k in range(1, int(depth.max(initial=0)) + 1):
        kids = np.flatnonzero(depth == k)
        kids = kids[np.lexsort((kids, parent[kids]))]
        parents = parent[kids]
        pos = np.arange(len(kids))
        first = np.r_[True, parents[1:] != parents[:-1]]
        rank = pos - np.maximum.accumulate(np.where(first, pos, 0))
        last = np.r_[parents[1:] != parents[:-1], True]
        rounds = tuple(np.flatnonzero(rank == r) for r in range(int(rank.max()) + 1))
        levels.append(_Level(kids, parents, rounds, last))
    F._cache["sibling_levels"] = levels
    return levels


def _groups(F: WeightedForest) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All non-root vertices grouped by parent: (kids, group starts, group parent)."""
    cached = F._cache.get("sibling_groups")
    if cached is not None:
        return cached
    parent = np.asarray(F.orient().parent)
    kids = np.flatnonzero(parent >= 0)
    kids = kids[np.lexsort((kids, parent[kids]))]
    starts = np.flatnonzero(np.r_[True, parent[kids][1:] != parent[kids][:-1]]) if len(kids) else kids
    result = (kids, starts, parent[kids[starts]] if len(kids) else kids)
    F._cache["sibling_groups"] = result
    return result


# ---------- scaled arithmetic on arrays ----------
def _normalize(*parts: np.ndarray) -> Tuple[Tuple[np.ndarray, ...], np.ndarray]:
    top = np.abs(parts[0])
    for p in parts[1:]:
        top = np.maximum(top, np.abs(p))
    _, k = np.frexp(top)
    return tuple(np.ldexp(p, -k) for p in parts), k.astype(np.int64)


def _combine(a, b):
    p1, q1, e1 = a
    p2, q2, e2 = b
    (p, q), k = _normalize(p1 * p2, q1 * p2 + p1 * q2)
    return p, q, e1 + e2 + k


def _to_logs(mantissa: np.ndarray, exp: np.ndarray) -> LogProduct:
    zero = mantissa == 0.0
    mag = np.log2(np.abs(np.where(zero, 1.0, mantissa))) + exp
    return LogProduct(np.where(zero, 0.0, mag), np.where(mantissa < 0.0, -1.0, 1.0), zero.astype(np.int64))


def _branch_values(F: WeightedForest, lams: np.ndarray) -> Tuple[LogProduct, LogProduct]:
    """
    (f, U) per vertex and column: f(v) = phi(T_v), U(v) = phi(T - T_v), with
    U = 1 at the root.
    """
    n, m = F.n, len(lams)
    orient = F.orient()
    w2 = np.asarray(orient.parent_weight)[:, None] ** 2
    shift = lams[None, :] - np.asarray(F.vertex_weight)[:, None]
    levels = _sibling_levels(F)

    (f, g), e = _normalize(shift, np.ones((n, m)))
    accP, accQ, accE = np.ones((n, m)), np.zeros((n, m)), np.zeros((n, m), dtype=np.int64)
    for lv in reversed(levels):
        for pos in lv.rounds:
            ks, ps = lv.kids[pos], lv.parents[pos]
            accP[ps], accQ[ps], accE[ps] = _combine(
                (accP[ps], accQ[ps], accE[ps]), (f[ks], w2[ks] * g[ks], e[ks])
            )
        ps = lv.parents[lv.last]
        (f[ps], g[ps]), k = _normalize(shift[ps] * accP[ps] - accQ[ps], accP[ps])
        e[ps] = accE[ps] + k

    upM, upE = np.ones((n, m)), np.zeros((n, m), dtype=np.int64)
    sideP, sideQ, sideE = np.ones((n, m)), np.zeros((n, m)), np.zeros((n, m), dtype=np.int64)
    for lv in levels:
        ks, ps = lv.kids, lv.parents
        block = (f[ks], w2[ks] * g[ks], e[ks])
        pre = [sideP[ps], sideQ[ps], sideE[ps]]
        for pos in lv.rounds[1:]:
            prev = pos - 1
            combined = _combine((pre[0][prev], pre[1][prev], pre[2][prev]), tuple(b[prev] for b in block))
            for arr, val in zip(pre, combined):
                arr[pos] = val
        suf = [np.ones_like(block[0]), np.zeros_like(block[1]), np.zeros_like(block[2])]
        for pos in reversed(lv.rounds):
            pos = pos[~lv.last[pos]]
            nxt = pos + 1
            combined = _combine(tuple(b[nxt] for b in block), (suf[0][nxt], suf[1][nxt], suf[2][nxt]))
            for arr, val in zip(suf, combined):
                arr[pos] = val
        P, Q, E = _combine(tuple(pre), tuple(suf))
        (up_f, up_g), k = _normalize(shift[ps] * P - Q, P)
        upM[ks], upE[ks] = up_f, E + k
        sideP[ks], sideQ[ks], sideE[ks] = up_f, w2[ks] * up_g, E + k
    return _to_logs(f, e), _to_logs(upM, upE)


def _children_product(F: WeightedForest, f: LogProduct, keep: np.ndarray) -> LogProduct:
    """Product of f over the children of every vertex, children with keep=False skipped."""
    n, m = f.log2.shape
    out = LogProduct(np.zeros((n, m)), np.ones((n, m)), np.zeros((n, m), dtype=np.int64))
    kids, starts, owner = _groups(F)
    if len(kids) == 0:
        return out
    k = keep[kids]
    out.log2[owner] = np.add.reduceat(np.where(k, f.log2[kids], 0.0), starts, axis=0)
    out.sign[owner] = np.multiply.reduceat(np.where(k, f.sign[kids], 1.0), starts, axis=0)
    out.zeros[owner] = np.add.reduceat(np.where(k, f.zeros[kids], 0), starts, axis=0)
    return out


# ---------- star vertices ----------
def choose_roots(F: WeightedForest, deleted: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """
    Column-wise find_root_vertex: largest log2|phi(A - v)| above the zero
    threshold, pendants first, near-ties to the lowest index.
    """
    top = deleted.max(axis=0)
    dead = np.flatnonzero(top == -np.inf)
    if len(dead):
        raise NoStarVertex(f"phi(A - v, {lams[dead[0]]!r}) vanishes at every vertex").at_eigenvalue(float(lams[dead[0]]))
    good = deleted > top + _LOG2_ZERO
    pendant = np.array([F.degree(v) <= 1 for v in range(F.n)])[:, None]
    cand = good & pendant
    cand = np.where(cand.any(axis=0), cand, good)
    best = np.where(cand, deleted, -np.inf).max(axis=0)
    pick = cand & (deleted >= best + _LOG2_TIE)
    return np.argmax(pick, axis=0)


# ---------- eigenvectors ----------
def _on_path(F: WeightedForest, roots: np.ndarray) -> np.ndarray:
    """on[v, j]: v lies on the path from roots[j] up to the tree root."""
    parent = np.asarray(F.orient().parent)
    on = np.zeros((F.n, len(roots)), dtype=bool)
    cols = np.arange(len(roots))
    cur = roots.copy()
    while len(cur):
        on[cur, cols] = True
        up = parent[cur]
        keep = up >= 0
        cur, cols = up[keep], cols[keep]
    return on


def _alpha(F: WeightedForest, f: LogProduct, up: LogProduct, roots: np.ndarray) -> LogProduct:
    n, m = f.log2.shape
    parent = np.asarray(F.orient().parent)
    logw = np.log2(np.abs(np.asarray(F.orient().parent_weight, dtype=float)) + (parent < 0))[:, None]
    signw = np.where(np.asarray(F.orient().parent_weight) < 0.0, -1.0, 1.0)[:, None]
    on = _on_path(F, roots)

    # every branch at v except the one towards the star vertex
    inner = _children_product(F, f, ~on)
    rest = inner * LogProduct(
        np.where(on, up.log2, 0.0), np.where(on, up.sign, 1.0), np.where(on, up.zeros, 0)
    )
    h = LogProduct(np.zeros((n, m)), np.ones((n, m)), np.zeros((n, m), dtype=np.int64))

    # up the path: h(parent) = h(c) w(c) prod(children of c off the path)
    cols = np.arange(m)
    cur = roots.copy()
    while len(cur):
        p = parent[cur]
        keep = p >= 0
        cur, cols, p = cur[keep], cols[keep], p[keep]
        h.log2[p, cols] = h.log2[cur, cols] + logw[cur, 0] + inner.log2[cur, cols]
        h.sign[p, cols] = h.sign[cur, cols] * signw[cur, 0] * inner.sign[cur, cols]
        h.zeros[p, cols] = h.zeros[cur, cols] + inner.zeros[cur, cols]
        cur = p

    # down into the off-path subtrees: h(c) = h(p) w(c) rest(p) / f(c)
    for lv in _sibling_levels(F):
        ks, ps = lv.kids, lv.parents
        off = ~on[ks]
        h.log2[ks] = np.where(off, h.log2[ps] + logw[ks] + rest.log2[ps] - f.log2[ks], h.log2[ks])
        h.sign[ks] = np.where(off, h.sign[ps] * signw[ks] * rest.sign[ps] * f.sign[ks], h.sign[ks])
        h.zeros[ks] = np.where(off, h.zeros[ps] + rest.zeros[ps] - f.zeros[ks], h.zeros[ks])
    return h * rest


def _columns(alpha: LogProduct) -> Tuple[np.ndarray, np.ndarray]:
    logs = alpha.log2abs()
    top = logs.max(axis=0)
    top = np.where(np.isfinite(top), top, 0.0)
    exps = np.where((top > -_SAFE_LOG2) & (top < _SAFE_LOG2), 0, np.round(top)).astype(np.int64)
    with np.errstate(under="ignore", over="ignore"):
        entries = np.where(alpha.zeros > 0, 0.0, alpha.sign * np.exp2(alpha.log2 - exps[None, :]))
    return entries, exps


def _simple_chunk(F: WeightedForest, lams: np.ndarray) -> SimpleBatch:
    f, up = _branch_values(F, lams)
    deleted = _children_product(F, f, np.ones_like(f.zeros, dtype=bool)) * up
    logs = deleted.log2abs()
    roots = choose_roots(F, logs, lams)
    cols = np.arange(len(lams))
    cert_log2 = logs[roots, cols]
    with np.errstate(over="ignore", under="ignore"):
        certificate = np.where(np.isfinite(cert_log2), deleted.sign[roots, cols] * np.exp2(cert_log2), 0.0)
    entries, exps = _columns(_alpha(F, f, up, roots))
    return SimpleBatch(lams, roots, cert_log2, certificate, entries, exps)


def simple_eigenvectors(F: WeightedForest, lams: Sequence[float]) -> SimpleBatch:
    """
    Star vertex and alpha for each simple eigenvalue of the tree F, processed
    CHUNK eigenvalues at a time. Column j matches
    simple_eigenvector(F, lams[j], find_root_vertex(F, lams[j])).
    """
    lams = np.asarray(lams, dtype=float).ravel()
    if F.n and len(F.orient().roots) != 1:
        raise InputError(f"batched eigenvectors need a single tree, got {len(F.orient().roots)} components")
    if F.n == 0 or len(lams) == 0:
        empty = np.zeros(0)
        return SimpleBatch(lams, np.zeros(0, dtype=int), empty, empty, np.zeros((F.n, 0)), np.zeros(0, dtype=np.int64))
    parts = [_simple_chunk(F, lams[s:s + CHUNK]) for s in range(0, len(lams), CHUNK)]
    log.debug("%d simple eigenvectors in %d chunk(s), n=%d", len(lams), len(parts), F.n)
    return SimpleBatch(
        lams,
        np.concatenate([p.roots for p in parts]),
        np.concatenate([p.certificate_log2 for p in parts]),
        np.concatenate([p.certificate for p in parts]),
        np.concatenate([p.entries for p in parts], axis=1),
        np.concatenate([p.exponents for p in parts]),
    )
