# acyclic/oracle/checks.py
"""
Residual checks shared by the eigenvector service, the CLI and the verification suite.

Every check returns a nonnegative relative residual; 0 means the relation holds exactly.
"""
from typing import Sequence

import numpy as np

from acyclic.errors import ZeroVector
from acyclic.model.forest import WeightedForest, induced_matrix, tree_path
from acyclic.services.polynomial import deleted_vertex_values, phi_eval, phi_eval_minus


def residual(F: WeightedForest, lam: float, vec: Sequence[float]) -> float:
    """
    max_v |(lam - w(v)) vec(v) - sum_{z~v} w(vz) vec(z)| / (||A||_inf * ||vec||_inf)
    with ||A||_inf taken as 1 for the zero matrix.
    """
    vec = np.asarray(vec, dtype=float)
    return float(residuals(F, [lam], vec[:, None])[0])


def residuals(F: WeightedForest, lams: Sequence[float], V: np.ndarray) -> np.ndarray:
    """`residual` for every column of V (n x m), column j against lams[j]."""
    V = np.asarray(V, dtype=float)
    scale = np.max(np.abs(V), axis=0, initial=0.0)
    if np.any(scale == 0.0):
        raise ZeroVector()
    R = (np.asarray(lams, dtype=float)[None, :] - np.asarray(F.vertex_weight, dtype=float)[:, None]) * V
    if F.edges:
        R -= F.sparse_adjacency @ V
    norm = F.inf_norm or 1.0
    return np.max(np.abs(R), axis=0, initial=0.0) / (norm * scale)


def _rel(lhs: float, rhs: float, *terms: float) -> float:
    scale = max([abs(lhs), abs(rhs), *(abs(t) for t in terms), 1e-300])
    return abs(lhs - rhs) / scale


# ---------- matching polynomial identities on forests ----------
def char_poly_identity_residual(F: WeightedForest, x: float) -> float:
    """phi(F, x) against det(xI - A) computed densely."""
    A = induced_matrix(F)
    det = float(np.prod(x - np.linalg.eigvalsh(A))) if F.n else 1.0
    return _rel(phi_eval(F, x).value, det)


def derivative_identity_residual(F: WeightedForest, x: float) -> float:
    """phi'(F, x) = sum_v phi(F - v, x)."""
    deleted = deleted_vertex_values(F, x)
    return _rel(phi_eval(F, x).deriv, sum(deleted), *deleted)


def recurrence_identity_residual(F: WeightedForest, v: int, x: float) -> float:
    """phi(F) = (x - w(v)) phi(F - v) - sum_{z~v} w(vz)^2 phi(F - v - z) at x."""
    lhs = phi_eval(F, x).value
    first = (x - F.vertex_weight[v]) * phi_eval_minus(F, [v], x).value
    terms = [w * w * phi_eval_minus(F, [v, z], x).value for z, w in F.adjacency[v]]
    return _rel(lhs, first - sum(terms), first, *terms)


def edge_identity_residual(F: WeightedForest, u: int, v: int, x: float) -> float:
    """phi(F) = phi(F - uv) - w(uv)^2 phi(F - u - v) for an edge uv."""
    w = dict(F.adjacency[u])[v]
    cut = WeightedForest(F.n, F.vertex_weight, tuple(e for e in F.edges if {e[0], e[1]} != {u, v}))
    lhs = phi_eval(F, x).value
    a = phi_eval(cut, x).value
    b = w * w * phi_eval_minus(F, [u, v], x).value
    return _rel(lhs, a - b, a, b)


def summation_identity_residual(F: WeightedForest, lam: float, u: int) -> float:
    """sum_v (W(P_uv) phi(A - P_uv, lam))^2 = phi(A - u, lam) phi'(A, lam)."""
    total = 0.0
    for v in range(F.n):
        path = tree_path(F, u, v)
        if path is None:
            continue
        total += (path.weight * phi_eval_minus(F, path.vertices, lam).value) ** 2
    rhs = phi_eval_minus(F, [u], lam).value * phi_eval(F, lam).deriv
    return _rel(total, rhs)

