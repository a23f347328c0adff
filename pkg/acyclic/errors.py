# acyclic/errors.py
"""
Exception hierarchy.

InputError subclasses map to CLI exit code 3, NumericalError subclasses to
exit code 2. Vertex indices are stored 0-based and rendered 1-based.
"""
from typing import Optional, Sequence


class AcyclicError(Exception):
    """Base class. `lam` is filled in when the error surfaces while a specific
    eigenvalue is being processed."""

    lam: Optional[float] = None

    def at_eigenvalue(self, lam: float) -> "AcyclicError":
        if self.lam is None:
            self.lam = lam
        return self

    def __str__(self) -> str:
        msg = super().__str__()
        if self.lam is not None:
            return f"lambda={self.lam!r}: {msg}"
        return msg


# ---------- input errors ----------
class InputError(AcyclicError, ValueError):
    pass


class NotSymmetric(InputError):
    def __init__(self, i: int, j: int, a: float, b: float):
        self.i, self.j = i, j
        super().__init__(
            f"matrix is not symmetric: M[{i + 1}][{j + 1}]={a!r} but M[{j + 1}][{i + 1}]={b!r}"
        )


class HasCycle(InputError):
    def __init__(self, cycle: Sequence[int]):
        self.cycle = list(cycle)
        path = "-".join(str(v + 1) for v in self.cycle)
        super().__init__(f"off-diagonal support contains a cycle: {path}")


CycleDetected = HasCycle


class ParseError(InputError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ZeroEdgeWeight(InputError):
    def __init__(self, u: int, v: int, line: Optional[int] = None):
        self.u, self.v, self.line = u, v, line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}edge {u + 1}-{v + 1} has weight 0 (edge weights must be nonzero)")


class DuplicateEdge(InputError):
    def __init__(self, u: int, v: int, line: Optional[int] = None):
        self.u, self.v, self.line = u, v, line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}edge {u + 1}-{v + 1} is listed more than once")


# ---------- argument errors ----------
class TooLarge(AcyclicError, ValueError):
    def __init__(self, n: int, limit: int, what: str):
        self.n, self.limit = n, limit
        super().__init__(f"{what} supports at most {limit} vertices, got {n}")


class InvalidTolerance(AcyclicError, ValueError):
    def __init__(self, tol: float):
        super().__init__(f"tolerance must be > 0, got {tol!r}")


class ZeroVector(AcyclicError, ValueError):
    def __init__(self):
        super().__init__("vector is identically zero")


class SelectorError(AcyclicError, ValueError):
    """Eigenvalue selector does not match the computed spectrum."""


# ---------- numerical failures ----------
class NumericalError(AcyclicError, RuntimeError):
    pass


class NoStarVertex(NumericalError):
    pass


class StarSetNotFound(NumericalError):
    pass


class NotAStarVertex(NumericalError):
    pass


class NonPositiveNormalizer(NumericalError):
    pass


class InvalidStarSet(NumericalError):
    pass


class NotConverged(NumericalError):
    pass
