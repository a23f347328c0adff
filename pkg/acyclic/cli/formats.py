# acyclic/cli/formats.py
"""
Input/output formats. Indices are 1-based in files, 0-based in memory.

Edge list:
    # comment
    n 3
    v 1 0.5          (optional vertex weight, default 0)
    e 1 2 1.0
    e 2 3 -2.5

MatrixMarket: `%%MatrixMarket matrix coordinate real symmetric`; diagonal
entries are vertex weights, off-diagonal entries are edges.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from acyclic.errors import DuplicateEdge, InputError, ParseError, ZeroEdgeWeight
from acyclic.model.forest import WeightedForest

log = logging.getLogger(__name__)

MM_HEADER = "%%MatrixMarket matrix coordinate real symmetric"
FORMATS = ("auto", "edgelist", "matrixmarket")


def _float(token: str, line: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(line, f"{what} must be a real number, got {token!r}")


def _index(token: str, line: int, n: int) -> int:
    try:
        i = int(token)
    except ValueError:
        raise ParseError(line, f"vertex index must be an integer, got {token!r}")
    if not 1 <= i <= n:
        raise ParseError(line, f"vertex index {i} outside 1..{n}")
    return i - 1


# ---------- edge list ----------
def parse_edgelist(text: str) -> WeightedForest:
    n: Optional[int] = None
    weights: Dict[int, float] = {}
    edges: Dict[Tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kind, args = tokens[0], tokens[1:]
        if kind == "n":
            if n is not None:
                raise ParseError(lineno, "vertex count given twice")
            if len(args) != 1:
                raise ParseError(lineno, "expected 'n <count>'")
            try:
                n = int(args[0])
            except ValueError:
                raise ParseError(lineno, f"vertex count must be an integer, got {args[0]!r}")
            if n < 1:
                raise ParseError(lineno, f"vertex count must be positive, got {n}")
            continue
        if n is None:
            raise ParseError(lineno, "'n <count>' must come before vertices and edges")
        if kind == "v":
            if len(args) != 2:
                raise ParseError(lineno, "expected 'v <index> <weight>'")
            v = _index(args[0], lineno, n)
            if v in weights:
                raise ParseError(lineno, f"vertex {v + 1} weight given twice")
            weights[v] = _float(args[1], lineno, "vertex weight")
        elif kind == "e":
            if len(args) != 3:
                raise ParseError(lineno, "expected 'e <i> <j> <weight>'")
            i, j = _index(args[0], lineno, n), _index(args[1], lineno, n)
            if i == j:
                raise ParseError(lineno, f"self-loop at vertex {i + 1}; use 'v {i + 1} <weight>' for the diagonal")
            w = _float(args[2], lineno, "edge weight")
            if w == 0.0:
                raise ZeroEdgeWeight(i, j, lineno)
            key = (min(i, j), max(i, j))
            if key in edges:
                raise DuplicateEdge(*key, line=lineno)
            edges[key] = w
        else:
            raise ParseError(lineno, f"unknown record {kind!r} (expected n, v or e)")
    if n is None:
        raise ParseError(1, "missing 'n <count>' line")
    vertex_weight = tuple(weights.get(v, 0.0) for v in range(n))
    return WeightedForest(n, vertex_weight, tuple((u, v, w) for (u, v), w in edges.items()))


def write_edgelist(F: WeightedForest) -> str:
    lines = [f"n {F.n}"]
    lines += [f"v {v + 1} {format(w, '.17g')}" for v, w in enumerate(F.vertex_weight) if w != 0.0]
    lines += [f"e {u + 1} {v + 1} {format(w, '.17g')}" for u, v, w in F.edges]
    return "\n".join(lines) + "\n"


# ---------- MatrixMarket ----------
def parse_matrixmarket(text: str) -> WeightedForest:
    lines = text.splitlines()
    if not lines or lines[0].split()[:1] != ["%%MatrixMarket"]:
        raise ParseError(1, "missing %%MatrixMarket header")
    header = [t.lower() for t in lines[0].split()[1:]]
    if len(header) != 4 or header[0] != "matrix" or header[1] != "coordinate" \
            or header[2] not in ("real", "integer") or header[3] != "symmetric":
        raise ParseError(1, f"unsupported header {lines[0]!r}; expected {MM_HEADER!r}")

    expected: Optional[int] = None
    n = 0
    weights: Dict[int, float] = {}
    edges: Dict[Tuple[int, int], float] = {}
    count = 0
    for lineno, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens or tokens[0].startswith("%"):
            continue
        if expected is None:
            if len(tokens) != 3:
                raise ParseError(lineno, "expected '<rows> <cols> <entries>'")
            try:
                rows, cols, nnz = (int(t) for t in tokens)
            except ValueError:
                raise ParseError(lineno, "size line must hold three integers")
            if rows != cols:
                raise ParseError(lineno, f"matrix must be square, got {rows}x{cols}")
            expected, n = nnz, rows
            continue
        if len(tokens) != 3:
            raise ParseError(lineno, "expected '<row> <col> <value>'")
        i, j = _index(tokens[0], lineno, n), _index(tokens[1], lineno, n)
        value = _float(tokens[2], lineno, "entry")
        count += 1
        if i == j:
            if i in weights:
                raise ParseError(lineno, f"diagonal entry ({i + 1},{i + 1}) given twice")
            weights[i] = value
            continue
        if value == 0.0:
            raise ZeroEdgeWeight(i, j, lineno)
        key = (min(i, j), max(i, j))
        if key in edges:
            raise DuplicateEdge(*key, line=lineno)
        edges[key] = value
    if expected is None:
        raise ParseError(len(lines), "missing size line")
    if count != expected:
        raise ParseError(len(lines), f"header announces {expected} entries, found {count}")
    vertex_weight = tuple(weights.get(v, 0.0) for v in range(n))
    return WeightedForest(n, vertex_weight, tuple((u, v, w) for (u, v), w in edges.items()))


def write_matrixmarket(F: WeightedForest) -> str:
    entries: List[str] = [f"{v + 1} {v + 1} {format(w, '.17g')}" for v, w in enumerate(F.vertex_weight) if w != 0.0]
    # lower triangle: row > col
    entries += [f"{v + 1} {u + 1} {format(w, '.17g')}" for u, v, w in F.edges]
    return "\n".join([MM_HEADER, f"{F.n} {F.n} {len(entries)}", *entries]) + "\n"


# ---------- dispatch ----------
def detect_format(text: str) -> str:
    for raw in text.splitlines():
        if raw.strip():
            return "matrixmarket" if raw.lstrip().startswith("%%MatrixMarket") else "edgelist"
    return "edgelist"


def parse_text(text: str, fmt: str = "auto") -> WeightedForest:
    if fmt not in FORMATS:
        raise ValueError(f"Unsupported format: {fmt}")
    if fmt == "auto":
        fmt = detect_format(text)
        log.debug("detected %s input", fmt)
    return parse_matrixmarket(text) if fmt == "matrixmarket" else parse_edgelist(text)


def parse_input(path, fmt: str = "auto") -> WeightedForest:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputError(f"cannot read {path}: {err}")
    return parse_text(text, fmt)
