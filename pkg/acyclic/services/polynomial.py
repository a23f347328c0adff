# acyclic/services/polynomial.py
"""
Characteristic / matching polynomial evaluation on weighted forests.

For a forest, det(xI - A) equals the matching polynomial, and both satisfy the
vertex recurrence

    phi(F) = (x - w(v)) phi(F - v) - sum_{z ~ v} w(vz)^2 phi(F - v - z).

Rooting every tree, each vertex v gets the pair f(v) = phi(T_v), g(v) =
phi(T_v - v) over its subtree T_v, and a child c enters its parent through
the factor (f(c), w^2 g(c)). Factors multiply as

    (P1, Q1) * (P2, Q2) = (P1 P2, Q1 P2 + P1 Q2)

so f(v) = (x - w(v)) P - Q, g(v) = P. No step divides by f(c): f(c) = 0
whenever x is an eigenvalue of a subtree.

Every intermediate carries a power-of-two exponent next to its mantissa, so
the rescaling is exact and large forests do not overflow.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from acyclic.errors import TooLarge
from acyclic.model.forest import Orientation, WeightedForest, delete_vertices

log = logging.getLogger(__name__)

COEFF_LIMIT = 64
DELETED_CACHE = 8


def _ldexp(m: float, k: int) -> float:
    try:
        return math.ldexp(m, k)
    except OverflowError:
        return math.copysign(math.inf, m)


@dataclass(frozen=True)
class ValueDeriv:
    """Dual number value + deriv*eps: phi and dphi/dx at one point."""

    value: float
    deriv: float = 0.0

    @classmethod
    def seed(cls, x: float) -> "ValueDeriv":
        return cls(float(x), 1.0)

    def __add__(self, other):
        if isinstance(other, ValueDeriv):
            return ValueDeriv(self.value + other.value, self.deriv + other.deriv)
        return ValueDeriv(self.value + other, self.deriv)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ValueDeriv):
            return ValueDeriv(self.value - other.value, self.deriv - other.deriv)
        return ValueDeriv(self.value - other, self.deriv)

    def __rsub__(self, other):
        return ValueDeriv(other - self.value, -self.deriv)

    def __neg__(self):
        return ValueDeriv(-self.value, -self.deriv)

    def __mul__(self, other):
        if isinstance(other, ValueDeriv):
            return ValueDeriv(
                self.value * other.value,
                self.deriv * other.value + self.value * other.deriv,
            )
        return ValueDeriv(self.value * other, self.deriv * other)

    __rmul__ = __mul__

    def ldexp(self, k: int) -> "ValueDeriv":
        return ValueDeriv(_ldexp(self.value, k), _ldexp(self.deriv, k))

    def magnitude(self) -> float:
        return max(abs(self.value), abs(self.deriv))


Number = Union[float, ValueDeriv]


def _mag(a: Number) -> float:
    return a.magnitude() if isinstance(a, ValueDeriv) else abs(a)


def _scale(a: Number, k: int) -> Number:
    return a.ldexp(k) if isinstance(a, ValueDeriv) else _ldexp(a, k)


def normalize(parts: Tuple[Number, ...], exp: int) -> Tuple[Tuple[Number, ...], int]:
    """Rescale mantissas by a common power of two so the largest is in [0.5, 1)."""
    m = max(_mag(p) for p in parts)
    if m == 0.0 or not math.isfinite(m):
        return parts, exp
    k = math.frexp(m)[1]
    if k == 0:
        return parts, exp
    return tuple(_scale(p, -k) for p in parts), exp + k


class Scaled(NamedTuple):
    """mantissa * 2**exp"""

    mantissa: Number
    exp: int = 0

    def __mul__(self, other: "Scaled") -> "Scaled":
        (m,), e = normalize((self.mantissa * other.mantissa,), self.exp + other.exp)
        return Scaled(m, e)

    def value(self) -> Number:
        return _scale(self.mantissa, self.exp)

    def log2abs(self) -> float:
        m = self.mantissa.value if isinstance(self.mantissa, ValueDeriv) else self.mantissa
        if m == 0.0:
            return -math.inf
        return math.log2(abs(m)) + self.exp

    def sign(self) -> float:
        m = self.mantissa.value if isinstance(self.mantissa, ValueDeriv) else self.mantissa
        return math.copysign(1.0, m) if m != 0.0 else 0.0


ONE = Scaled(1.0, 0)

# a factor (P, Q, exp); the identity factor is an empty set of children
Factor = Tuple[Number, Number, int]
UNIT: Factor = (1.0, 0.0, 0)


def combine(a: Factor, b: Factor) -> Factor:
    p1, q1, e1 = a
    p2, q2, e2 = b
    (p, q), e = normalize((p1 * p2, q1 * p2 + p1 * q2), e1 + e2)
    return p, q, e


def product(values: Iterable[Scaled]) -> Scaled:
    total = ONE
    for s in values:
        total = total * s
    return total


def all_but_one(values: Sequence[Scaled]) -> List[Scaled]:
    """[prod_{j != i} values[j] for each i], division free."""
    k = len(values)
    prefix = [ONE] * (k + 1)
    for i, s in enumerate(values):
        prefix[i + 1] = prefix[i] * s
    out = [ONE] * k
    suffix = ONE
    for i in range(k - 1, -1, -1):
        out[i] = prefix[i] * suffix
        suffix = values[i] * suffix
    return out


def subtree_factors(
    F: WeightedForest, orient: Orientation, x: Number
) -> Tuple[List[Number], List[Number], List[int]]:
    """
    Bottom-up pass: for every oriented vertex v return mantissas of
    f(v) = phi(T_v, x) and g(v) = phi(T_v - v, x) sharing the exponent e(v).
    Vertices outside the orientation keep f = g = 0.
    """
    f: List[Number] = [0.0] * F.n
    g: List[Number] = [0.0] * F.n
    e: List[int] = [0] * F.n
    weight = F.vertex_weight
    for v in reversed(orient.order):
        acc = UNIT
        for c in orient.children[v]:
            w2 = orient.parent_weight[c] ** 2
            acc = combine(acc, (f[c], w2 * g[c], e[c]))
        P, Q, ex = acc
        (fv, gv), ex = normalize(((x - weight[v]) * P - Q, P), ex)
        f[v], g[v], e[v] = fv, gv, ex
    return f, g, e


# ---------- evaluation ----------
def phi_eval_scaled(F: WeightedForest, x: float) -> Scaled:
    """phi(F, x) and phi'(F, x) as a ValueDeriv mantissa with a binary exponent."""
    orient = F.orient()
    f, _, e = subtree_factors(F, orient, ValueDeriv.seed(x))
    total = Scaled(ValueDeriv(1.0, 0.0), 0)
    for r in orient.roots:
        total = total * Scaled(f[r], e[r])
    return total


def phi_eval(F: WeightedForest, x: float) -> ValueDeriv:
    """(phi(F, x), phi'(F, x)); the empty forest gives (1, 0)."""
    return phi_eval_scaled(F, x).value()


def phi_eval_minus(F: WeightedForest, S: Iterable[int], x: float) -> ValueDeriv:
    """phi(A - S, x) and its derivative."""
    return phi_eval(delete_vertices(F, S).forest, x)


def component_values(F: WeightedForest, x: float) -> List[Scaled]:
    """phi(T, x) for every tree of F, in root order (scaled, value only)."""
    orient = F.orient()
    f, _, e = subtree_factors(F, orient, float(x))
    return [Scaled(f[r], e[r]) for r in orient.roots]


def deleted_vertex_values_scaled(F: WeightedForest, x: float) -> Tuple[Scaled, ...]:
    """
    phi(A - v, x) for every vertex v in O(n): one bottom-up pass, then a
    top-down pass that hands every child the factor of the tree above it.
    The last few shifts per forest are cached.
    """
    x = float(x)
    key = ("deleted", x)
    cached = F._cache.get(key)
    if cached is not None:
        return cached
    out = _deleted_vertex_values(F, x)
    stale = [k for k in list(F._cache) if isinstance(k, tuple) and k[0] == "deleted"]
    for k in stale[: max(0, len(stale) - DELETED_CACHE + 1)]:
        F._cache.pop(k, None)
    F._cache[key] = out
    return out


def _deleted_vertex_values(F: WeightedForest, x: float) -> Tuple[Scaled, ...]:
    orient = F.orient()
    f, g, e = subtree_factors(F, orient, x)
    roots = orient.roots
    others = all_but_one([Scaled(f[r], e[r]) for r in roots])
    comp_rest = {r: others[i] for i, r in enumerate(roots)}
    comp = F.component_id

    side: List[Factor] = [UNIT] * F.n
    out: List[Scaled] = [ONE] * F.n
    weight = F.vertex_weight
    for v in orient.order:
        kids = orient.children[v]
        blocks = [(f[c], orient.parent_weight[c] ** 2 * g[c], e[c]) for c in kids]
        prefix: List[Factor] = [side[v]]
        for b in blocks:
            prefix.append(combine(prefix[-1], b))
        P, _, ex = prefix[-1]
        out[v] = Scaled(P, ex) * comp_rest[comp[v]]
        suffix = UNIT
        for i in range(len(kids) - 1, -1, -1):
            Pm, Qm, em = combine(prefix[i], suffix)
            (up_f, up_g), em = normalize(((x - weight[v]) * Pm - Qm, Pm), em)
            side[kids[i]] = (up_f, orient.parent_weight[kids[i]] ** 2 * up_g, em)
            suffix = combine(blocks[i], suffix)
    return tuple(out)


def deleted_vertex_values(F: WeightedForest, x: float) -> List[float]:
    """[phi(A - v, x) for v in 0..n-1]"""
    return [s.value() for s in deleted_vertex_values_scaled(F, x)]


# ---------- coefficient mode ----------
@dataclass(frozen=True)
class DensePolynomial:
    """Coefficients, lowest degree first."""

    coeffs: Tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        return float(npoly.polyval(x, self.coeffs))


def _pad(c: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(length)
    out[: len(c)] = c
    return out


def matching_poly_coeffs(F: WeightedForest) -> DensePolynomial:
    """Coefficients of mu(F, x) = phi(F, x) from the same recurrence run on polynomials."""
    if F.n > COEFF_LIMIT:
        raise TooLarge(F.n, COEFF_LIMIT, "coefficient mode")
    orient = F.orient()
    f: List[np.ndarray] = [np.zeros(1)] * F.n
    g: List[np.ndarray] = [np.zeros(1)] * F.n
    for v in reversed(orient.order):
        P, Q = np.ones(1), np.zeros(1)
        for c in orient.children[v]:
            w2 = orient.parent_weight[c] ** 2
            P, Q = npoly.polymul(P, f[c]), npoly.polyadd(npoly.polymul(Q, f[c]), w2 * npoly.polymul(P, g[c]))
        f[v] = npoly.polysub(npoly.polymul([-F.vertex_weight[v], 1.0], P), Q)
        g[v] = P
    total = np.ones(1)
    for r in orient.roots:
        total = npoly.polymul(total, f[r])
    return DensePolynomial(tuple(float(c) for c in _pad(total, F.n + 1)))
