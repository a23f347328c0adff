# providers/eigensolvers.py
from typing import Optional, Protocol, Tuple

import numpy as np

from acyclic.config import get_settings
from acyclic.oracle.jacobi import jacobi_eigen

# Optional LAPACK driver via SciPy – faster reference for large oracle runs
try:
    import scipy.linalg as sla
    HAS_SCIPY = True
except Exception:
    HAS_SCIPY = False


class EigenSolver(Protocol):
    name: str

    def eigh(self, M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]: ...


class JacobiSolver:
    name = "jacobi"

    def eigh(self, M):
        return jacobi_eigen(M)


class NumpySolver:
    name = "numpy"

    def eigh(self, M):
        return np.linalg.eigh(np.asarray(M, dtype=float))


class ScipySolver:
    name = "scipy"

    def eigh(self, M):
        return sla.eigh(np.asarray(M, dtype=float))


def _scipy_solver() -> EigenSolver:
    if not HAS_SCIPY:
        raise RuntimeError("scipy not installed. pip install scipy")
    return ScipySolver()


def get_eigensolver(provider: Optional[str] = None) -> EigenSolver:
    """
    Choose the reference eigensolver; without an explicit name the
    `eigensolver` setting (EIGENSOLVER_PROVIDER) decides:
      "jacobi" (default) | "numpy" | "scipy"
    All return (ascending eigenvalues, orthonormal eigenvector columns).
    """
    provider = (provider or get_settings().eigensolver).lower()
    if provider == "jacobi":
        return JacobiSolver()
    elif provider == "numpy":
        return NumpySolver()
    elif provider == "scipy":
        return _scipy_solver()
    else:
        raise ValueError(f"Unsupported EIGENSOLVER_PROVIDER: {provider}")
