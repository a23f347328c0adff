# acyclic/services/eigenvectors.py
"""
Closed-form eigenvectors of weighted forests.

For a simple eigenvalue lam and a star vertex u,

    alpha(v) = W(P_uv) * phi(A - P_uv, lam)

is a lam-eigenvector (zero outside u's tree). Rooting the tree at u,
A - P_uv splits into the subtrees hanging off the path, so

    alpha(v) = h(v) * g(v),   h(c) = h(v) * w(vc) * prod_{c' != c} f(c'),

with f, g the subtree values of the polynomial service. One walk down from u
gives every entry.

A multiple eigenvalue with star set U = {u_1..u_k} gets one vector per u_i:
lam is simple in A - (U - u_i), and the vector is the formula above applied
inside u_i's tree of that forest, extended by zeros.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from acyclic.config import get_settings
from acyclic.errors import AcyclicError, InvalidStarSet, NonPositiveNormalizer, NotAStarVertex
from acyclic.model.forest import SubForest, WeightedForest, components, delete_vertices, induced_subforest, tree_path
from acyclic.oracle.checks import residual, residuals
from acyclic.services.batched import CHUNK, simple_eigenvectors
from acyclic.services.polynomial import (
    ONE,
    Scaled,
    all_but_one,
    component_values,
    deleted_vertex_values_scaled,
    phi_eval_minus,
    phi_eval_scaled,
    product,
    subtree_factors,
)
from acyclic.services.spectrum import eigenvalues, multiplicity
from acyclic.services.star_sets import ZERO_THRESHOLD, StarSet, find_star_set

log = logging.getLogger(__name__)

RESIDUAL_LIMIT = 1e-7
_LOG2_ZERO = math.log2(ZERO_THRESHOLD)
_SAFE_LOG2 = 1000


@dataclass(frozen=True, eq=False)
class EigenVector:
    """
    True entries are entries * 2**exponent; exponent is nonzero only when the
    closed form over- or underflows binary64.
    """

    lam: float
    root: int
    entries: np.ndarray
    residual: float
    exponent: int = 0

    @property
    def n(self) -> int:
        return len(self.entries)

    def normalized(self) -> np.ndarray:
        """Entries scaled to unit Euclidean norm."""
        return self.entries / np.linalg.norm(self.entries)


@dataclass(frozen=True, eq=False)
class EigenBasis:
    lam: float
    star_set: StarSet
    vectors: Tuple[EigenVector, ...]

    @property
    def k(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        """n x k, one column per vector, each column scaled to max-abs 1."""
        cols = [v.entries / np.max(np.abs(v.entries)) for v in self.vectors]
        return np.column_stack(cols)

    @property
    def residual(self) -> float:
        return max(v.residual for v in self.vectors)


# ---------- helpers ----------
def _component_logs(F: WeightedForest, lam: float, u: int) -> Tuple[List[int], List[float]]:
    if len(F.orient().roots) == 1:
        return list(range(F.n)), [s.log2abs() for s in deleted_vertex_values_scaled(F, lam)]
    members = [v for v in range(F.n) if F.component_id[v] == F.component_id[u]]
    sub = induced_subforest(F, members)
    return members, [s.log2abs() for s in deleted_vertex_values_scaled(sub.forest, lam)]


def _require_star_vertex(F: WeightedForest, lam: float, u: int) -> None:
    members, logs = _component_logs(F, lam, u)
    top = max(logs)
    mine = logs[members.index(u)]
    if top == -math.inf or mine <= top + _LOG2_ZERO:
        raise NotAStarVertex(f"phi(A - {u + 1}, {lam!r}) is numerically zero; {u + 1} is not a star vertex")
    if len(F.orient().roots) > 1:
        _require_regular_elsewhere(F, lam, u)


def _require_regular_elsewhere(F: WeightedForest, lam: float, u: int) -> None:
    """lam must not be an eigenvalue of any other tree, or alpha vanishes."""
    own = F.component_id[u]
    slack = _LOG2_ZERO + math.log2(max(1.0, F.inf_norm, abs(lam)))
    for comp in components(F):
        if comp.vertices[0] == own:
            continue
        whole = phi_eval_scaled(comp.forest, lam).log2abs()
        top = max(s.log2abs() for s in deleted_vertex_values_scaled(comp.forest, lam))
        if whole == -math.inf or whole <= top + slack:
            raise NotAStarVertex(
                f"{lam!r} is also an eigenvalue of the tree of vertex {comp.vertices[0] + 1}; "
                f"{u + 1} is not a star vertex of the forest"
            )


def _other_components(F: WeightedForest, lam: float, u: int) -> Scaled:
    roots = F.orient().roots
    if len(roots) == 1:
        return ONE
    own = F.component_id[u]
    return product(s for r, s in zip(roots, component_values(F, lam)) if r != own)


def _to_entries(values: Sequence[Optional[Scaled]]) -> Tuple[np.ndarray, int]:
    logs = [s.log2abs() for s in values if s is not None]
    top = max((t for t in logs if t > -math.inf), default=0.0)
    exponent = 0 if -_SAFE_LOG2 < top < _SAFE_LOG2 else int(round(top))
    entries = np.zeros(len(values))
    for v, s in enumerate(values):
        if s is not None:
            entries[v] = Scaled(s.mantissa, s.exp - exponent).value()
    return entries, exponent


def _make(F: WeightedForest, lam: float, u: int, entries: np.ndarray, exponent: int) -> EigenVector:
    return EigenVector(lam=lam, root=u, entries=entries, residual=residual(F, lam, entries), exponent=exponent)


# ---------- simple eigenvalues ----------
def simple_eigenvector_scaled(F: WeightedForest, lam: float, u: int) -> List[Optional[Scaled]]:
    """alpha rooted at u as scaled values; None outside u's tree."""
    lam = float(lam)
    orient = F.orient(root=u)
    f, g, e = subtree_factors(F, orient, lam)
    rest = _other_components(F, lam, u)
    h: List[Scaled] = [ONE] * F.n
    alpha: List[Optional[Scaled]] = [None] * F.n
    for v in orient.order:
        kids = orient.children[v]
        alpha[v] = h[v] * Scaled(g[v], e[v]) * rest
        if not kids:
            continue
        off_path = all_but_one([Scaled(f[c], e[c]) for c in kids])
        for c, others in zip(kids, off_path):
            h[c] = h[v] * others * Scaled(orient.parent_weight[c], 0)
    return alpha


def simple_eigenvector(F: WeightedForest, lam: float, u: int) -> EigenVector:
    _require_star_vertex(F, lam, u)
    entries, exponent = _to_entries(simple_eigenvector_scaled(F, lam, u))
    return _make(F, lam, u, entries, exponent)


def simple_eigenvector_naive(F: WeightedForest, lam: float, u: int) -> EigenVector:
    """One phi evaluation per vertex; the reference for simple_eigenvector."""
    _require_star_vertex(F, lam, u)
    entries = np.zeros(F.n)
    for v in range(F.n):
        path = tree_path(F, u, v)
        if path is not None:
            entries[v] = path.weight * phi_eval_minus(F, path.vertices, lam).value
    return _make(F, lam, u, entries, 0)


def unit_eigenvector(F: WeightedForest, lam: float, u: int) -> EigenVector:
    """alpha / sqrt(phi(A - u, lam) * phi'(A, lam)), a unit eigenvector."""
    alpha = simple_eigenvector(F, lam, u)
    minus = phi_eval_scaled(delete_vertices(F, [u]).forest, lam)
    whole = phi_eval_scaled(F, lam)
    sign = minus.sign() * math.copysign(1.0, whole.mantissa.deriv) if whole.mantissa.deriv else 0.0
    if sign <= 0.0:
        raise NonPositiveNormalizer(
            f"phi(A - {u + 1}, {lam!r}) * phi'(A, {lam!r}) is not positive; lambda is not simple here"
        )
    log2_norm = 0.5 * (minus.log2abs() + math.log2(abs(whole.mantissa.deriv)) + whole.exp)
    entries = alpha.entries * np.exp2(alpha.exponent - log2_norm)
    return _make(F, lam, u, entries, 0)


def magnitude_profile(F: WeightedForest, lam: float) -> np.ndarray:
    """sqrt |phi(A - v, lam)| for every v; magnitudes only, no signs."""
    logs = np.array([s.log2abs() for s in deleted_vertex_values_scaled(F, lam)])
    return np.exp2(0.5 * logs)


# ---------- multiple eigenvalues ----------
def _inside_tree(F: WeightedForest, lam: float, u: int, others: Sequence[int]) -> EigenVector:
    rest: SubForest = delete_vertices(F, others)
    local = rest.index[u]
    comp = rest.forest.component_id[local]
    members = [v for v in range(rest.forest.n) if rest.forest.component_id[v] == comp]
    tree = induced_subforest(rest.forest, members)
    try:
        vec = simple_eigenvector(tree.forest, lam, tree.index[local])
    except NotAStarVertex as err:
        raise InvalidStarSet(f"{u + 1} is not a star vertex of its tree in A - U_i: {err}") from err
    entries = rest.lift(tree.lift(vec.entries))
    return _make(F, lam, u, entries, vec.exponent)


def eigenbasis(F: WeightedForest, lam: float, star: StarSet) -> EigenBasis:
    U = list(star.vertices)
    if star.certificate_log2 == -math.inf:
        raise InvalidStarSet(f"phi(A - U, {lam!r}) vanishes for U={[u + 1 for u in U]}")
    if len(U) == 1:
        log.debug("simple eigenvalue %r: single vector rooted at %d", lam, U[0] + 1)
        return EigenBasis(lam, star, (simple_eigenvector(F, lam, U[0]),))
    vectors = tuple(_inside_tree(F, lam, u, [z for z in U if z != u]) for u in U)
    return EigenBasis(lam, star, vectors)


def orthonormalize(basis: EigenBasis) -> np.ndarray:
    """Modified Gram-Schmidt over the vectors of one basis; n x k, same column order."""
    Q = basis.matrix().astype(float)
    for j in range(Q.shape[1]):
        Q[:, j] /= np.linalg.norm(Q[:, j])
        Q[:, j + 1:] -= np.outer(Q[:, j], Q[:, j] @ Q[:, j + 1:])
    return Q


# ---------- whole decomposition ----------
def _lift_basis(comp: SubForest, F: WeightedForest, basis: EigenBasis) -> EigenBasis:
    star = replace(basis.star_set, vertices=tuple(sorted(comp.vertices[u] for u in basis.star_set.vertices)))
    vectors = tuple(
        EigenVector(
            lam=v.lam,
            root=comp.vertices[v.root],
            entries=comp.lift(v.entries),
            residual=residual(F, v.lam, comp.lift(v.entries)),
            exponent=v.exponent,
        )
        for v in basis.vectors
    )
    return EigenBasis(basis.lam, star, vectors)


def _solve_one(F: WeightedForest, comp: SubForest, lam: float, k: int, tol: float) -> EigenBasis:
    try:
        star = find_star_set(comp.forest, lam, k, tol)
        basis = _lift_basis(comp, F, eigenbasis(comp.forest, lam, star))
    except AcyclicError as err:
        raise err.at_eigenvalue(lam)
    log.debug("lambda=%r k=%d star set %s residual %.3g", lam, k, [u + 1 for u in basis.star_set.vertices], basis.residual)
    if basis.residual > RESIDUAL_LIMIT:
        log.warning("lambda=%r residual %.3g above %.0e", lam, basis.residual, RESIDUAL_LIMIT)
    return basis


def eigenbases_at(F: WeightedForest, lam: float, tol: float) -> List[EigenBasis]:
    """Bases for one eigenvalue, one per tree in which it occurs."""
    bases = []
    for comp in components(F):
        k = multiplicity(comp.forest, lam, tol)
        if k:
            bases.append(_solve_one(F, comp, lam, k, tol))
    return bases


def _simple_bases(F: WeightedForest, comp: SubForest, lams: Sequence[float]) -> List[EigenBasis]:
    """Bases of simple eigenvalues of one tree, star vertices chosen as find_root_vertex does."""
    batch = simple_eigenvectors(comp.forest, lams)
    V = np.zeros((F.n, len(batch.lams)))
    V[list(comp.vertices)] = batch.entries
    res = residuals(F, batch.lams, V)
    bases = []
    for j, lam in enumerate(batch.lams.tolist()):
        u = comp.vertices[int(batch.roots[j])]
        star = StarSet(lam, (u,), float(batch.certificate[j]), float(batch.certificate_log2[j]))
        vec = EigenVector(lam=lam, root=u, entries=V[:, j].copy(), residual=float(res[j]), exponent=int(batch.exponents[j]))
        if vec.residual > RESIDUAL_LIMIT:
            log.warning("lambda=%r residual %.3g above %.0e", lam, vec.residual, RESIDUAL_LIMIT)
        bases.append(EigenBasis(lam, star, (vec,)))
    return bases


def _multiple_bases(F: WeightedForest, comp: SubForest, lam: float, k: int, tol: float) -> List[EigenBasis]:
    return [_solve_one(F, comp, lam, k, tol)]


def full_eigendecomposition(F: WeightedForest, tol: float, threads: Optional[int] = None) -> List[EigenBasis]:
    """
    One EigenBasis per (tree, eigenvalue of that tree), ordered by (lambda, first star vertex).

    Simple eigenvalues of a tree go through the batched pass CHUNK at a time;
    multiple ones get a star set each.
    """
    work = []
    for comp in components(F):
        pairs = list(eigenvalues(comp.forest, tol))
        simple = [p.value for p in pairs if p.multiplicity == 1]
        for start in range(0, len(simple), CHUNK):
            work.append(partial(_simple_bases, F, comp, simple[start:start + CHUNK]))
        for p in pairs:
            if p.multiplicity > 1:
                work.append(partial(_multiple_bases, F, comp, p.value, p.multiplicity, tol))
    threads = threads or get_settings().threads
    if threads > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: job(), work))
    else:
        results = [job() for job in work]
    bases = [b for chunk in results for b in chunk]
    bases.sort(key=lambda b: (b.lam, b.star_set.vertices[0]))
    return bases
