from typing import List, Optional

from pydantic import BaseModel, Field

from .bessel import WeightPreset


class TraceCheckConfig(BaseModel):
    """Inputs of a Petersson trace formula check."""
    k: int = Field(..., ge=12)
    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    c_max: Optional[int] = Field(None, ge=1, description="Kloosterman truncation; derived from tol if omitted")
    tol: float = Field(default=1e-8, gt=0)

    class Config:
        json_schema_extra = {"example": {"k": 12, "n": 1, "m": 2, "tol": 1e-8}}


class PeterssonResult(BaseModel):
    k: int
    n: int
    m: int
    c_max: int
    lhs: float
    rhs: float
    gap: float
    tail_bound: float


class MaindoneResult(BaseModel):
    """Fourth moment against the main term plus off-diagonal Kloosterman sum."""
    k: int
    label: int
    l4_direct: float
    main_plus_offdiag: float
    gap: float
    diagonal: float
    offdiagonal: float
    exact_identity: float = Field(..., description="Diagonal and off-diagonal terms before residues")
    exact_gap: float
    diagonal_only_gap: float
    tail_bound: float


class FormL4Record(BaseModel):
    k: int
    label: int
    l4_fourth: float = Field(..., description="Watson-route fourth moment")
    l4_fourth_quadrature: Optional[float] = None
    conjecture_ratio: float


class AverageExperiment(BaseModel):
    """Weighted average of fourth moments over weights k in (K, 2K)."""
    K: int = Field(..., ge=6, le=20)
    weight_function: WeightPreset = Field(default=WeightPreset.BUMP)
    W: Optional[float] = Field(None, description="Integral of the weight function")
    quadrature_check: bool = Field(default=False)
    per_form: List[FormL4Record] = Field(default_factory=list)
    average: Optional[float] = None
    target: float = Field(default=1.9098593171027440, description="6/pi")
