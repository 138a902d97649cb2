from typing import List

from pydantic import BaseModel, Field


class QuadratureDiagnostics(BaseModel):
    """How a fundamental-domain integral converged."""
    y_max: float
    order: int
    levels: int = Field(..., description="Refinement levels evaluated")
    nodes: int
    rel_change: float
    cusp_tail: float


class NormReport(BaseModel):
    """L2 and L4 norms of a normalized form."""
    k: int
    label: int
    scale: float
    l2: float
    l4: float
    l4_fourth: float
    conjecture_ratio: float = Field(..., description="(pi/3) times the fourth power of the L4 norm")
    diagnostics: QuadratureDiagnostics


class WatsonResult(BaseModel):
    """Triple product by quadrature against its L-value expression."""
    k: int
    f_label: int
    g_label: int
    lhs: float
    rhs: float
    rel_gap: float
    central_g: float
    central_sym2xg: float
    edge_f: float
    edge_g: float


class SpectralResult(BaseModel):
    """Fourth moment by quadrature against the sum of squared triple products."""
    k: int
    label: int
    l4_fourth: float
    spectral_sum: float
    rel_gap: float
    triple_products: List[float]
