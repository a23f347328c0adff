# acyclic/cli/commands.py
"""
Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure (including a
residual above RESIDUAL_LIMIT), 3 input error. Results go to stdout,
diagnostics to stderr.
"""
import argparse
import logging
import sys
from typing import List, Optional, Sequence, TextIO

import numpy as np
import pandas as pd
from pydantic import ValidationError

from acyclic.config import get_settings
from acyclic.errors import AcyclicError, InputError, NumericalError, SelectorError, TooLarge
from acyclic.model.forest import WeightedForest, laplacian_forest
from acyclic.cli.formats import FORMATS, parse_input
from acyclic.cli.schemas import (
    COMMANDS,
    BasisOut,
    EigenvalueOut,
    EigSelector,
    MatchPolyOut,
    PointOut,
    ReportOut,
    RunConfig,
    SpectrumOut,
    StarSetOut,
    StarSetsOut,
    dumps,
)
from acyclic.oracle.checks import (
    char_poly_identity_residual,
    derivative_identity_residual,
    edge_identity_residual,
    recurrence_identity_residual,
    summation_identity_residual,
)
from acyclic.oracle.enumeration import MAX_IDENTITY, WeightedGraph, hl_identity_residual
from acyclic.oracle.jacobi import MAX_N as JACOBI_MAX_N
from acyclic.services.eigenvectors import (
    RESIDUAL_LIMIT,
    EigenBasis,
    eigenbases_at,
    full_eigendecomposition,
    orthonormalize,
)
from acyclic.services.polynomial import matching_poly_coeffs, phi_eval
from acyclic.services.spectrum import Spectrum, cluster_width, eigenvalues
from acyclic.services.star_sets import find_root_vertex, find_star_set
from verification.generators import random_forest
from verification.suite import IDENTITY_TOL, HL_TOL, Report, check_forest, check_paths, run_suite

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="acyclic", description="Eigenvalues and closed-form eigenvectors of acyclic symmetric matrices.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", nargs="?", help="edge-list or MatrixMarket file (verify/identities: optional)")
    parser.add_argument("--format", choices=FORMATS, default="auto")
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--output", "-o", choices=("text", "json"), default="text")
    parser.add_argument("--json", dest="output", action="store_const", const="json", help="same as --output json")
    parser.add_argument("--eig", help="eigenvalue selector: index=K or value=X")
    parser.add_argument("--orthonormalize", action="store_true", help="orthonormal basis within each eigenspace")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trees", type=int, default=50, help="random instances for verify/identities without input")
    parser.add_argument("--graphs", type=int, default=None, help="verify: random path-identity graphs (default: --trees)")
    parser.add_argument("--max-n", type=int, default=200, help="verify: largest random tree")
    parser.add_argument("--laplacian", action="store_true", help="use L = D - A of the edge weights")
    parser.add_argument("--at", type=float, action="append", default=[], help="matchpoly: evaluate at x (repeatable)")
    parser.add_argument("--verbose", "-v", action="count", default=0)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    try:
        selector = EigSelector.parse(ns.eig) if ns.eig else None
        return RunConfig(
            command=ns.command,
            input_path=ns.input,
            format=ns.format,
            tol=ns.tol,
            output=ns.output,
            eig_selector=selector,
            orthonormalize=ns.orthonormalize,
            seed=ns.seed,
            laplacian=ns.laplacian,
            at=ns.at,
            trees=ns.trees,
            graphs=ns.graphs,
            max_n=ns.max_n,
            verbose=ns.verbose,
        )
    except (ValidationError, ValueError) as err:
        raise UsageError(str(err))


# ---------- helpers ----------
def _load(config: RunConfig) -> WeightedForest:
    if config.input_path is None:
        raise UsageError(f"{config.command} needs an input file")
    F = parse_input(config.input_path, config.format)
    if config.laplacian:
        F = laplacian_forest(F)
    log.debug("loaded forest with %d vertices, %d edges", F.n, len(F.edges))
    return F


def _fmt(x: float, scale: float, tol: float) -> str:
    if abs(x) <= cluster_width(scale, tol):
        x = 0.0
    return format(x, ".12g")


def _select(F: WeightedForest, spectrum: Spectrum, selector: Optional[EigSelector]) -> List[float]:
    if selector is None:
        return spectrum.values
    if selector.kind == "index":
        expanded = spectrum.expanded()
        if selector.index > len(expanded):
            raise SelectorError(f"eigenvalue index {selector.index} outside 1..{len(expanded)}")
        return [float(expanded[selector.index - 1])]
    # value selector: nearest eigenvalue within the cluster width
    values = np.asarray(spectrum.values)
    if not len(values):
        raise SelectorError("empty spectrum")
    best = int(np.argmin(np.abs(values - selector.value)))
    if abs(values[best] - selector.value) > cluster_width(selector.value, spectrum.tol) * max(1.0, F.inf_norm):
        raise SelectorError(f"{selector.value!r} is not an eigenvalue (nearest is {values[best]!r})")
    return [float(values[best])]


def _basis_out(basis: EigenBasis, ortho: bool) -> BasisOut:
    vectors = orthonormalize(basis).T if ortho else [v.entries for v in basis.vectors]
    exponents = [v.exponent for v in basis.vectors]
    return BasisOut(
        lam=basis.lam,
        star_set=[u + 1 for u in basis.star_set.vertices],
        vectors=[[float(x) for x in vec] for vec in vectors],
        residual=basis.residual,
        exponents=exponents if any(exponents) and not ortho else None,
    )


def _report_out(config: RunConfig, df: pd.DataFrame, seed: Optional[int]) -> ReportOut:
    return ReportOut(
        command=config.command,
        seed=seed,
        passed=bool(df["passed"].all()) if len(df) else True,
        rows=[{k: v.item() if isinstance(v, np.generic) else v for k, v in row.items()} for row in df.to_dict(orient="records")],
    )


def _emit_report(config: RunConfig, out: TextIO, df: pd.DataFrame, seed: Optional[int]) -> int:
    report = _report_out(config, df, seed)
    if config.output == "json":
        out.write(dumps(report))
    else:
        out.write(df.to_string(index=False) + "\n")
        out.write(("PASS" if report.passed else "FAIL") + "\n")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


# ---------- commands ----------
def cmd_spectrum(config: RunConfig, out: TextIO) -> int:
    F = _load(config)
    spectrum = eigenvalues(F, config.tol)
    scale = max(1.0, F.inf_norm)
    if config.output == "json":
        out.write(dumps(SpectrumOut(
            n=F.n,
            eigenvalues=[EigenvalueOut(value=p.value, multiplicity=p.multiplicity) for p in spectrum],
            diagnostics=list(spectrum.diagnostics),
        )))
    else:
        out.write(", ".join(f"{_fmt(p.value, scale, config.tol)}({p.multiplicity})" for p in spectrum) + "\n")
    return EXIT_OK


def cmd_eigvec(config: RunConfig, out: TextIO) -> int:
    F = _load(config)
    spectrum = eigenvalues(F, config.tol)
    if config.eig_selector is None:
        bases = full_eigendecomposition(F, config.tol)
    else:
        bases = []
        for lam in _select(F, spectrum, config.eig_selector):
            bases += eigenbases_at(F, lam, config.tol)
    worst = max((b.residual for b in bases), default=0.0)
    if config.output == "json":
        out.write(dumps(SpectrumOut(
            n=F.n,
            eigenvalues=[EigenvalueOut(value=p.value, multiplicity=p.multiplicity) for p in spectrum],
            bases=[_basis_out(b, config.orthonormalize) for b in bases],
            diagnostics=list(spectrum.diagnostics),
        )))
    else:
        scale = max(1.0, F.inf_norm)
        for b in bases:
            shown = _basis_out(b, config.orthonormalize)
            out.write(f"lambda = {_fmt(b.lam, scale, config.tol)}  multiplicity {b.k}  star set {shown.star_set}  residual {b.residual:.3g}\n")
            for vec in shown.vectors:
                out.write("  [" + ", ".join(format(x, ".10g") for x in vec) + "]\n")
    if worst > RESIDUAL_LIMIT:
        log.error("largest residual %.3g exceeds %.0e", worst, RESIDUAL_LIMIT)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_starset(config: RunConfig, out: TextIO) -> int:
    F = _load(config)
    spectrum = eigenvalues(F, config.tol)
    mults = {p.value: p.multiplicity for p in spectrum}
    rows = []
    for lam in _select(F, spectrum, config.eig_selector):
        k = mults.get(lam) or 1
        try:
            star = find_star_set(F, lam, k, config.tol)
        except AcyclicError as err:
            raise err.at_eigenvalue(lam)
        rows.append(StarSetOut(lam=lam, multiplicity=k, star_set=[u + 1 for u in star.vertices], certificate=star.certificate))
    if config.output == "json":
        out.write(dumps(StarSetsOut(n=F.n, star_sets=rows)))
    else:
        scale = max(1.0, F.inf_norm)
        for r in rows:
            out.write(f"lambda = {_fmt(r.lam, scale, config.tol)}  k={r.multiplicity}  U={r.star_set}  phi(A-U)={r.certificate:.6g}\n")
    return EXIT_OK


def cmd_matchpoly(config: RunConfig, out: TextIO) -> int:
    F = _load(config)
    points = []
    for x in config.at:
        vd = phi_eval(F, x)
        points.append(PointOut(x=x, value=vd.value, derivative=vd.deriv))
    coeffs = None
    if not config.at:
        try:
            coeffs = list(matching_poly_coeffs(F).coeffs)
        except TooLarge as err:
            raise UsageError(f"{err}; evaluate at points with --at instead")
    result = MatchPolyOut(n=F.n, coefficients=coeffs, points=points)
    if config.output == "json":
        out.write(dumps(result))
    else:
        if coeffs is not None:
            out.write("coefficients (lowest degree first): " + " ".join(format(c, ".17g") for c in coeffs) + "\n")
        for p in points:
            out.write(f"phi({p.x:.17g}) = {p.value:.17g}  phi' = {p.derivative:.17g}\n")
    return EXIT_OK


def cmd_verify(config: RunConfig, out: TextIO) -> int:
    if config.input_path is None:
        graphs = config.trees if config.graphs is None else config.graphs
        df = run_suite(config.seed, trees=config.trees, max_n=config.max_n, graphs=graphs, tol=min(config.tol, 1e-12))
        return _emit_report(config, out, df, config.seed)
    F = _load(config)
    report = Report()
    check_forest(F, report, tol=min(config.tol, 1e-12), rng=np.random.default_rng(config.seed), oracle_limit=JACOBI_MAX_N)
    return _emit_report(config, out, report.frame(), None)


def _forest_identities(F: WeightedForest, report: Report, rng: np.random.Generator) -> None:
    scale = max(1.0, F.inf_norm)
    for x in rng.uniform(-2.0, 2.0, size=5) * scale:
        report.add("char_poly_identity", char_poly_identity_residual(F, x), IDENTITY_TOL)
        report.add("derivative_identity", derivative_identity_residual(F, x), IDENTITY_TOL)
        if F.n:
            v = int(rng.integers(F.n))
            report.add("recurrence_identity", recurrence_identity_residual(F, v, x), IDENTITY_TOL)
        if F.edges:
            u, v, _ = F.edges[int(rng.integers(len(F.edges)))]
            report.add("edge_identity", edge_identity_residual(F, u, v, x), IDENTITY_TOL)
    if len(F.orient().roots) == 1:
        for p in eigenvalues(F, 1e-12):
            if p.multiplicity == 1 and F.n:
                try:
                    u = find_root_vertex(F, p.value)
                except AcyclicError:
                    report.fail("summation_identity", IDENTITY_TOL)
                    continue
                report.add("summation_identity", summation_identity_residual(F, p.value, u), IDENTITY_TOL)
    if 2 <= F.n <= MAX_IDENTITY:
        G = WeightedGraph.from_forest(F)
        u = int(rng.integers(F.n))
        others = [v for v in range(F.n) if v != u]
        H = rng.choice(others, size=int(rng.integers(1, len(others) + 1)), replace=False).tolist()
        report.add("path_identity", hl_identity_residual(G, u, H, float(rng.uniform(-2.0, 2.0))), HL_TOL)


def cmd_identities(config: RunConfig, out: TextIO) -> int:
    rng = np.random.default_rng(config.seed)
    report = Report()
    if config.input_path is not None:
        _forest_identities(_load(config), report, rng)
        return _emit_report(config, out, report.frame(), None)
    for _ in range(config.trees):
        n = int(rng.integers(1, 41))
        _forest_identities(random_forest(rng, n, trees=int(rng.integers(1, 3))), report, rng)
    check_paths(report, range(2, 13))
    return _emit_report(config, out, report.frame(), config.seed)


COMMAND_TABLE = {
    "spectrum": cmd_spectrum,
    "eigvec": cmd_eigvec,
    "starset": cmd_starset,
    "matchpoly": cmd_matchpoly,
    "verify": cmd_verify,
    "identities": cmd_identities,
}


def run(config: RunConfig, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return COMMAND_TABLE[config.command](config, out)
    except (UsageError, SelectorError) as e:
        err.write(f"usage error: {e}\n")
        return EXIT_USAGE
    except InputError as e:
        err.write(f"input error: {e}\n")
        return EXIT_INPUT
    except NumericalError as e:
        err.write(f"numerical failure: {e}\n")
        return EXIT_NUMERICAL
    except AcyclicError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    try:
        level = get_settings().log_level
    except ValueError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return EXIT_USAGE
    if config.verbose:
        level = "DEBUG" if config.verbose > 1 else "INFO"
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)
    return run(config)
