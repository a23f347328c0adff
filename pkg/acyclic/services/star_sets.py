# acyclic/services/star_sets.py
"""
Star vertices and star sets.

U is a lambda-star set when |U| equals the multiplicity k of lambda and
lambda is not an eigenvalue of A - U. For a simple eigenvalue {u} is a star
set exactly when phi(A - u, lambda) != 0, i.e. when the eigenvector is nonzero
at u; pendant vertices are preferred.
"""
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

from acyclic.errors import NoStarVertex, StarSetNotFound
from acyclic.model.forest import WeightedForest, delete_vertices, induced_subforest
from acyclic.services.polynomial import Scaled, deleted_vertex_values_scaled, phi_eval_scaled
from acyclic.services.spectrum import multiplicity

log = logging.getLogger(__name__)

ZERO_THRESHOLD = 1e-8
TIE_THRESHOLD = 1e-9
EXHAUSTIVE_LIMIT = 20
DEFAULT_TOL = 1e-10

_LOG2_ZERO = math.log2(ZERO_THRESHOLD)
_LOG2_TIE = math.log2(1.0 - TIE_THRESHOLD)


@dataclass(frozen=True)
class StarSet:
    lam: float
    vertices: Tuple[int, ...]
    certificate: float          # phi(A - U, lam)
    certificate_log2: float     # log2 |phi(A - U, lam)|, finite even when the value overflows

    def __len__(self) -> int:
        return len(self.vertices)


def _pick(logs: Sequence[float], candidates: Iterable[int]) -> Optional[int]:
    """Lowest index among near-maximal candidates."""
    candidates = list(candidates)
    if not candidates:
        return None
    best = max(logs[v] for v in candidates)
    if best == -math.inf:
        return None
    return min(v for v in candidates if logs[v] >= best + _LOG2_TIE)


def find_root_vertex(F: WeightedForest, lam: float, component: Optional[int] = None) -> int:
    """
    Vertex u maximising |phi(A - u, lam)|, pendants first, ties to the lowest index.

    With `component` (any vertex of it) only that tree is searched and the
    values are taken inside it.
    """
    if component is not None:
        members = [v for v in range(F.n) if F.component_id[v] == F.component_id[component]]
        sub = induced_subforest(F, members)
        return sub.vertices[find_root_vertex(sub.forest, lam)]

    if F.n == 0:
        raise NoStarVertex(f"empty forest has no star vertex for lambda={lam!r}")
    logs = [s.log2abs() for s in deleted_vertex_values_scaled(F, lam)]
    top = max(logs)
    if top == -math.inf:
        raise NoStarVertex(f"phi(A - v, {lam!r}) vanishes at every vertex")
    floor = top + _LOG2_ZERO
    good = [v for v in range(F.n) if logs[v] > floor]
    pendants = [v for v in good if F.degree(v) <= 1]
    u = _pick(logs, pendants) if pendants else _pick(logs, good)
    if u is None:
        raise NoStarVertex(f"no vertex clears the zero threshold at lambda={lam!r}")
    return u


def _certify(F: WeightedForest, lam: float, U: Sequence[int]) -> StarSet:
    value: Scaled = phi_eval_scaled(delete_vertices(F, U).forest, lam)
    return StarSet(
        lam=lam,
        vertices=tuple(sorted(U)),
        certificate=float(value.value().value),
        certificate_log2=value.log2abs(),
    )


def _greedy(F: WeightedForest, lam: float, k: int, tol: float) -> List[int]:
    U: List[int] = []
    for step in range(k):
        rest = delete_vertices(F, U)
        G = rest.forest
        left = k - step
        if left == 1:
            U.append(rest.vertices[find_root_vertex(G, lam)])
            break
        order = list(G.pendants) + [v for v in range(G.n) if G.degree(v) != 1]
        for v in order:
            if multiplicity(delete_vertices(G, [v]).forest, lam, tol) == left - 1:
                U.append(rest.vertices[v])
                break
        else:
            raise StarSetNotFound(f"no vertex lowers the multiplicity of {lam!r} below {left}")
    return U


def _exhaustive(F: WeightedForest, lam: float, k: int, tol: float) -> List[int]:
    scored: List[Tuple[float, Tuple[int, ...]]] = []
    for U in combinations(range(F.n), k):
        lg = phi_eval_scaled(delete_vertices(F, U).forest, lam).log2abs()
        if lg > -math.inf:
            scored.append((lg, U))
    # largest |phi| first; stable sort keeps lexicographic order among equals
    scored.sort(key=lambda t: -t[0])
    for _, U in scored:
        if multiplicity(delete_vertices(F, U).forest, lam, tol) == 0:
            return list(U)
    raise StarSetNotFound(f"no {k}-subset of {F.n} vertices is a star set for {lam!r}")


def find_star_set(F: WeightedForest, lam: float, k: int, tol: float = DEFAULT_TOL) -> StarSet:
    """Greedy star set of size k; exhaustive search over k-subsets when greedy fails and n <= 20."""
    if k == 1:
        return _certify(F, lam, [find_root_vertex(F, lam)])
    try:
        U = _greedy(F, lam, k, tol)
        if multiplicity(delete_vertices(F, U).forest, lam, tol) != 0:
            raise StarSetNotFound(f"greedy set {[u + 1 for u in U]} leaves {lam!r} an eigenvalue")
    except (StarSetNotFound, NoStarVertex) as err:
        if F.n > EXHAUSTIVE_LIMIT:
            raise StarSetNotFound(str(err)) from err
        log.debug("greedy star set failed (%s); trying all %d-subsets", err, k)
        U = _exhaustive(F, lam, k, tol)
    return _certify(F, lam, U)
