# acyclic/oracle/closed_forms.py
"""Closed-form eigenpairs of paths and the identities they imply."""
from typing import Tuple

import numpy as np


def path_adjacency_eigenpairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """lambda_k = 2 cos(k pi / (n+1)), v_k(i) = sin(k i pi / (n+1)); column k-1 is v_k."""
    k = np.arange(1, n + 1)
    theta = k * np.pi / (n + 1)
    i = np.arange(1, n + 1)[:, None]
    return 2.0 * np.cos(theta), np.sin(i * theta[None, :])


def path_laplacian_eigenpairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """theta_k = 4 cos^2(k pi / 2n), v_k(i) = cos((n-k)(2i-1) pi / 2n)."""
    k = np.arange(1, n + 1)
    i = np.arange(1, n + 1)[:, None]
    values = 4.0 * np.cos(k * np.pi / (2 * n)) ** 2
    vectors = np.cos((n - k)[None, :] * (2 * i - 1) * np.pi / (2 * n))
    return values, vectors


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def path_product_identity(n: int, i: int, k: int) -> float:
    """
    prod_{j=1}^{n-i} (2cos(k pi/(n+1)) - 2cos(j pi/(n-i+1))) = sin(k i pi/(n+1)) / sin(k n pi/(n+1)),
    for 1 <= i, k <= n; returns the relative residual.
    """
    lam = 2.0 * np.cos(k * np.pi / (n + 1))
    j = np.arange(1, n - i + 1)
    lhs = float(np.prod(lam - 2.0 * np.cos(j * np.pi / (n - i + 1))))
    rhs = float(np.sin(k * i * np.pi / (n + 1)) / np.sin(k * n * np.pi / (n + 1)))
    return _rel(lhs, rhs)


def path_laplacian_determinant_identity(n: int, i: int, k: int) -> float:
    """
    det of the (n-i) x (n-i) tridiagonal matrix with diagonal 2cos(k pi/n)
    (last entry + 1) and unit off-diagonals equals
    sin(k(2i-1) pi/2n) / sin(k(2n-1) pi/2n); returns the relative residual.
    """
    m = n - i
    c = 2.0 * np.cos(k * np.pi / n)
    if m == 0:
        lhs = 1.0
    else:
        T = np.diag(np.full(m, c)) + np.diag(np.ones(m - 1), 1) + np.diag(np.ones(m - 1), -1)
        T[-1, -1] += 1.0
        lhs = float(np.linalg.det(T))
    rhs = float(np.sin(k * (2 * i - 1) * np.pi / (2 * n)) / np.sin(k * (2 * n - 1) * np.pi / (2 * n)))
    return _rel(lhs, rhs)
