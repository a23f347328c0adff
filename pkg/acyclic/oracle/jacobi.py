# acyclic/oracle/jacobi.py
"""
Cyclic Jacobi eigensolver, the dense reference for every spectral check.

Slow (O(n^3) per sweep) and simple enough to trust: each rotation zeroes one
off-diagonal pair, and orthogonality of V is preserved by construction.
"""
import logging
from typing import Tuple

import numpy as np

from acyclic.errors import InputError, NotConverged, TooLarge

log = logging.getLogger(__name__)

MAX_SWEEPS = 100
MAX_N = 2000
OFF_TOL = 1e-14


def _off(M: np.ndarray) -> float:
    return float(np.sqrt(max(np.sum(M * M) - np.sum(np.diag(M) ** 2), 0.0)))


def _rotate(M: np.ndarray, V: np.ndarray, p: int, q: int) -> None:
    apq = M[p, q]
    if apq == 0.0:
        return
    tau = (M[q, q] - M[p, p]) / (2.0 * apq)
    t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # columns, then rows: M <- J^T M J
    mp, mq = M[:, p].copy(), M[:, q].copy()
    M[:, p] = c * mp - s * mq
    M[:, q] = s * mp + c * mq
    mp, mq = M[p, :].copy(), M[q, :].copy()
    M[p, :] = c * mp - s * mq
    M[q, :] = s * mp + c * mq
    M[p, q] = M[q, p] = 0.0
    vp, vq = V[:, p].copy(), V[:, q].copy()
    V[:, p] = c * vp - s * vq
    V[:, q] = s * vp + c * vq


def jacobi_eigen(M) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ascending and the matching orthonormal eigenvector columns."""
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError(f"matrix must be square, got shape {M.shape}")
    n = M.shape[0]
    if n > MAX_N:
        raise TooLarge(n, MAX_N, "jacobi_eigen")
    if not np.array_equal(M, M.T):
        raise InputError("jacobi_eigen needs a symmetric matrix")
    V = np.eye(n)
    target = OFF_TOL * float(np.linalg.norm(M))
    for sweep in range(MAX_SWEEPS):
        if _off(M) <= target:
            log.debug("jacobi converged after %d sweeps (n=%d)", sweep, n)
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(M, V, p, q)
    else:
        if _off(M) > target:
            raise NotConverged(f"jacobi did not converge in {MAX_SWEEPS} sweeps (n={n})")
    values = np.diag(M).copy()
    order = np.argsort(values, kind="stable")
    return values[order], V[:, order]
