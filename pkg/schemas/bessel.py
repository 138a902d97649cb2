from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class BesselRegime(str, Enum):
    """Evaluation regimes for integer-order J-Bessel functions."""
    AUTO = "auto"
    SERIES = "series"
    QUADRATURE = "quadrature"
    LANGER = "langer"
    PRECISE = "precise"


class WeightPreset(str, Enum):
    """Named smooth weights supported on (1, 2)."""
    BUMP = "bump"


class BesselAvgConfig(BaseModel):
    """Scale and weight of a Bessel average over weights k."""
    K: float = Field(..., ge=20, description="Scale parameter")
    h: WeightPreset = Field(default=WeightPreset.BUMP, description="Weight on (1, 2)")
    parity: int = Field(default=2, description="Sum over k divisible by this modulus")
    x: Optional[float] = Field(None, gt=0)
    y: Optional[float] = Field(None, gt=0)

    class Config:
        json_schema_extra = {"example": {"K": 60, "h": "bump", "parity": 2, "x": 464.8, "y": 464.8}}


class PairAvgResult(BaseModel):
    """Footprint of the pair average: value, phase-removed value and window flag."""
    K: float
    x: float
    y: float
    value_re: float
    value_im: float
    phase_removed_re: float
    phase_removed_im: float
    support_flag: bool

    @property
    def value(self) -> complex:
        return complex(self.value_re, self.value_im)

    @property
    def phase_removed(self) -> complex:
        return complex(self.phase_removed_re, self.phase_removed_im)


class BoundCheck(BaseModel):
    """One bound evaluated against a direct Bessel average."""
    K: float
    x: float
    y: float
    re: float
    im: float
    abs_phase_removed: float
    support_flag: bool
    bound_name: str
    bound_value: float
    passed: bool = Field(..., serialization_alias="pass")
