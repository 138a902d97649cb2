from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class LValueKind(str, Enum):
    """Which L-value a record holds."""
    CENTRAL_G = "central_g"
    CENTRAL_SYM2XG = "central_sym2xg"
    EDGE_SYM2 = "edge_sym2"
    EDGE_SYM2_INVERSE = "edge_sym2_inverse"
    EDGE_SYM2_AFE = "edge_sym2_afe"


class LValue(BaseModel):
    """A truncated L-series value with its certified tail."""
    kind: LValueKind
    k: int = Field(..., description="Weight of the form the value belongs to")
    label: int = Field(..., description="Eigenform index within its space")
    value: float
    truncation: int = Field(..., description="Number of Dirichlet terms used")
    tail_bound: float
    g_label: Optional[int] = Field(None, description="Index of the weight-2k form, if any")
    scale: Optional[float] = Field(None, description="Smoothing scale X, if any")


class BumpResult(BaseModel):
    """Double Dirichlet series of A(n, r) against its L-function factorization."""
    s: float
    w: float
    N: int
    lhs: float
    rhs: float
    gap: float


class MainTermResult(BaseModel):
    """Diagonal main-term sum against (6/pi^2) L(1, sym^2 f)^2."""
    k: int
    label: int
    sum: float
    target: float
    gap: float
    rel_gap: float
    tail_bound: float
