# acyclic/cli/schemas.py
import math
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

COMMANDS = ("spectrum", "eigvec", "starset", "matchpoly", "verify", "identities")


class EigSelector(BaseModel):
    """`index=K` (1-based position in the ascending spectrum, counted with multiplicity) or `value=X`."""

    kind: Literal["index", "value"]
    index: Optional[int] = None
    value: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "EigSelector":
        key, sep, raw = text.partition("=")
        if not sep:
            raise ValueError(f"eigenvalue selector must be index=K or value=X, got {text!r}")
        key = key.strip().lower()
        if key == "index":
            return cls(kind="index", index=int(raw))
        if key == "value":
            return cls(kind="value", value=float(raw))
        raise ValueError(f"eigenvalue selector must be index=K or value=X, got {text!r}")

    @field_validator("index")
    @classmethod
    def _positive(cls, v):
        if v is not None and v < 1:
            raise ValueError(f"index must be >= 1, got {v}")
        return v


class RunConfig(BaseModel):
    command: Literal["spectrum", "eigvec", "starset", "matchpoly", "verify", "identities"]
    input_path: Optional[str] = None
    format: Literal["auto", "edgelist", "matrixmarket"] = "auto"
    tol: float = 1e-10
    output: Literal["text", "json"] = "text"
    eig_selector: Optional[EigSelector] = None
    orthonormalize: bool = False
    seed: int = 0
    laplacian: bool = False
    at: List[float] = []
    trees: int = 50
    graphs: Optional[int] = None
    max_n: int = 200
    verbose: int = 0

    @field_validator("tol")
    @classmethod
    def _tol_positive(cls, v):
        if not v > 0 or math.isinf(v):
            raise ValueError(f"tolerance must be > 0, got {v}")
        return v

    @field_validator("trees")
    @classmethod
    def _trees_positive(cls, v):
        if v < 1:
            raise ValueError(f"trees must be >= 1, got {v}")
        return v

    @field_validator("graphs")
    @classmethod
    def _graphs_nonnegative(cls, v):
        if v is not None and v < 0:
            raise ValueError(f"graphs must be >= 0, got {v}")
        return v

    @field_validator("max_n")
    @classmethod
    def _max_n_at_least_two(cls, v):
        if v < 2:
            raise ValueError(f"max-n must be >= 2, got {v}")
        return v


# ---------- output models ----------
class EigenvalueOut(BaseModel):
    value: float
    multiplicity: int


class BasisOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(alias="lambda")
    star_set: List[int]
    vectors: List[List[float]]
    residual: float
    exponents: Optional[List[int]] = None


class SpectrumOut(BaseModel):
    n: int
    eigenvalues: List[EigenvalueOut]
    bases: List[BasisOut] = []
    diagnostics: List[str] = []


class StarSetOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(alias="lambda")
    multiplicity: int
    star_set: List[int]
    certificate: float


class StarSetsOut(BaseModel):
    n: int
    star_sets: List[StarSetOut]


class PointOut(BaseModel):
    x: float
    value: float
    derivative: float


class MatchPolyOut(BaseModel):
    n: int
    coefficients: Optional[List[float]] = None
    points: List[PointOut] = []


class ReportOut(BaseModel):
    command: str
    seed: Optional[int] = None
    passed: bool
    rows: List[Dict[str, Any]]


# ---------- serialisation ----------
def dumps(model: BaseModel) -> str:
    """Indented JSON, aliases applied, unset optionals dropped; non-finite floats become null."""
    return model.model_dump_json(by_alias=True, exclude_none=True, indent=2) + "\n"
