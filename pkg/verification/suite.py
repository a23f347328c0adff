# verification/suite.py
"""
Seeded invariant suites.

Each check feeds a Tally; the report is a pandas DataFrame with one row per
invariant: invariant, cases, failures, worst, threshold, passed.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd
from scipy.linalg import subspace_angles
from tqdm.auto import tqdm

from acyclic.errors import AcyclicError
from acyclic.model.forest import WeightedForest, induced_matrix
from acyclic.oracle.checks import (
    char_poly_identity_residual,
    derivative_identity_residual,
    recurrence_identity_residual,
    summation_identity_residual,
)
from acyclic.oracle.closed_forms import (
    path_adjacency_eigenpairs,
    path_laplacian_determinant_identity,
    path_laplacian_eigenpairs,
    path_product_identity,
)
from acyclic.oracle.enumeration import WeightedGraph, hl_identity_residual
from acyclic.services.eigenvectors import full_eigendecomposition, simple_eigenvector
from acyclic.services.spectrum import eigenvalues
from providers.eigensolvers import EigenSolver, get_eigensolver
from verification.generators import path_forest, path_laplacian, random_graph, random_tree

log = logging.getLogger(__name__)

# --- thresholds ---
SPECTRUM_TOL = 1e-8
RESIDUAL_TOL = 1e-7
ANGLE_TOL = 1e-6
SEPARATION = 1e-4
PENDANT_TOL = 1e-8
IDENTITY_TOL = 1e-7
HL_TOL = 1e-9
PARALLEL_TOL = 1e-8
ORACLE_LIMIT = 60


@dataclass
class Tally:
    threshold: float
    cases: int = 0
    failures: int = 0
    worst: float = 0.0

    def add(self, value: float) -> None:
        self.cases += 1
        if not value <= self.threshold:
            self.failures += 1
        if math.isnan(value) or value > self.worst:
            self.worst = value


@dataclass
class Report:
    tallies: Dict[str, Tally] = field(default_factory=dict)

    def add(self, invariant: str, value: float, threshold: float) -> None:
        self.tallies.setdefault(invariant, Tally(threshold)).add(value)

    def fail(self, invariant: str, threshold: float) -> None:
        self.add(invariant, math.inf, threshold)

    def frame(self) -> pd.DataFrame:
        rows = [
            {
                "invariant": name,
                "cases": t.cases,
                "failures": t.failures,
                "worst": t.worst,
                "threshold": t.threshold,
                "passed": t.failures == 0,
            }
            for name, t in self.tallies.items()
        ]
        return pd.DataFrame(rows, columns=["invariant", "cases", "failures", "worst", "threshold", "passed"])


def _parallel_gap(a: np.ndarray, b: np.ndarray) -> float:
    """1 - |cos angle(a, b)|"""
    return 1.0 - abs(float(a @ b)) / (np.linalg.norm(a) * np.linalg.norm(b))


# ---------- per-forest checks ----------
def check_forest(
    F: WeightedForest,
    report: Report,
    tol: float = 1e-12,
    solver: Optional[EigenSolver] = None,
    rng: Optional[np.random.Generator] = None,
    oracle_limit: int = ORACLE_LIMIT,
) -> None:
    """Spectrum, eigenvector and identity checks for one forest; the dense oracle runs up to `oracle_limit` vertices."""
    solver = solver or get_eigensolver()
    rng = rng or np.random.default_rng(0)
    scale = max(1.0, F.inf_norm)
    try:
        spectrum = eigenvalues(F, tol)
        bases = full_eigendecomposition(F, tol)
    except AcyclicError as err:
        log.warning("decomposition failed: %s", err)
        report.fail("decomposition", 0.0)
        return

    oracle = F.n <= oracle_limit
    if oracle:
        ref_values, ref_vectors = solver.eigh(induced_matrix(F))
    ours = spectrum.expanded()
    report.add("sum_rule", abs(len(ours) - F.n), 0.0)
    if oracle and len(ours) == F.n:
        report.add("oracle_spectrum", float(np.max(np.abs(ours - ref_values), initial=0.0)) / scale, SPECTRUM_TOL)

    pendants = set(F.pendants)
    for basis in bases:
        for vec in basis.vectors:
            report.add("eigen_residual", vec.residual, RESIDUAL_TOL)
        # spans are compared only for eigenvalues separated from the rest
        if oracle:
            dist = np.abs(ref_values - basis.lam)
            near = dist <= 1e-6 * scale
            if near.sum() == basis.k and np.all(near | (dist >= SEPARATION)):
                angle = float(np.max(subspace_angles(basis.matrix(), ref_vectors[:, near])))
                report.add("oracle_subspace", angle, ANGLE_TOL)
        if basis.k == 1 and F.n >= 2 and len(F.orient().roots) == 1:
            alpha = basis.vectors[0].entries
            big = np.max(np.abs(alpha))
            hits = sum(1 for v in pendants if abs(alpha[v]) > PENDANT_TOL * big)
            report.add("pendant_support", 0.0 if hits >= 2 else 1.0, 0.0)

    if F.n <= 40:
        for x in rng.uniform(-2.0, 2.0, size=2) * scale:
            report.add("char_poly_identity", char_poly_identity_residual(F, x), IDENTITY_TOL)
            report.add("derivative_identity", derivative_identity_residual(F, x), IDENTITY_TOL)
            v = int(rng.integers(F.n)) if F.n else 0
            if F.n:
                report.add("recurrence_identity", recurrence_identity_residual(F, v, x), IDENTITY_TOL)
        simple = [b for b in bases if b.k == 1 and len(F.orient().roots) == 1]
        for basis in simple[:3]:
            u = basis.vectors[0].root
            report.add("summation_identity", summation_identity_residual(F, basis.lam, u), IDENTITY_TOL)


def check_paths(report: Report, sizes: Iterable[int]) -> None:
    """Path eigenpairs against their closed forms."""
    for n in sizes:
        values, vectors = path_adjacency_eigenpairs(n)
        ours = eigenvalues(path_forest(n), 1e-12).expanded()
        report.add("path_adjacency_values", float(np.max(np.abs(np.sort(values) - ours))), 1e-9)
        for k in range(n):
            vec = simple_eigenvector(path_forest(n), float(values[k]), n - 1)
            report.add("path_adjacency_vectors", _parallel_gap(vec.entries, vectors[:, k]), PARALLEL_TOL)
            for i in range(1, n + 1):
                report.add("path_product_identity", path_product_identity(n, i, k + 1), PARALLEL_TOL)
        values, vectors = path_laplacian_eigenpairs(n)
        L = path_laplacian(n)
        ours = eigenvalues(L, 1e-12).expanded()
        report.add("path_laplacian_values", float(np.max(np.abs(np.sort(values) - ours))), 1e-9)
        for k in range(n):
            vec = simple_eigenvector(L, float(values[k]), n - 1)
            report.add("path_laplacian_vectors", _parallel_gap(vec.entries, vectors[:, k]), PARALLEL_TOL)
            for i in range(1, n + 1):
                report.add(
                    "path_laplacian_determinant_identity", path_laplacian_determinant_identity(n, i, k + 1), PARALLEL_TOL
                )


def run_suite(
    seed: int,
    trees: int = 50,
    max_n: int = 200,
    graphs: int = 50,
    tol: float = 1e-12,
    progress: bool = True,
    graph_max_n: int = 12,
    path_max_n: int = 30,
) -> pd.DataFrame:
    """
    Random trees (n in 2..max_n), random graphs for the path identity
    (n in 2..graph_max_n, every fourth one a tree) and paths up to path_max_n,
    all from one seed.
    """
    rng = np.random.default_rng(seed)
    solver = get_eigensolver()
    report = Report()

    for _ in tqdm(range(trees), desc="Random trees", unit="tree", disable=not progress):
        n = int(rng.integers(2, max_n + 1))
        check_forest(random_tree(rng, n), report, tol, solver, rng)

    for i in tqdm(range(graphs), desc="Path identity", unit="graph", disable=not progress):
        n = int(rng.integers(2, graph_max_n + 1))
        weighted = bool(rng.integers(2))
        if i % 4 == 0:
            G = WeightedGraph.from_forest(random_tree(rng, n, vertex_weights=weighted))
        else:
            G = random_graph(rng, n, p=float(rng.uniform(0.2, 0.6)), vertex_weights=weighted)
        u = int(rng.integers(n))
        others = [v for v in range(n) if v != u]
        H = rng.choice(others, size=int(rng.integers(1, len(others) + 1)), replace=False).tolist()
        x = float(rng.uniform(-3.0, 3.0))
        report.add("path_identity", hl_identity_residual(G, u, H, x), HL_TOL)

    check_paths(report, range(2, path_max_n + 1))
    return report.frame()
