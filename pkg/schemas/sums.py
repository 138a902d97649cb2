from math import gcd
from typing import Optional

from pydantic import BaseModel, Field, model_validator
from sympy import primefactors


class KloostermanParams(BaseModel):
    """Arguments of a Kloosterman sum S(n, m; c)."""
    n: int = Field(..., description="First frequency, reduced mod c internally")
    m: int = Field(..., description="Second frequency, reduced mod c internally")
    c: int = Field(..., ge=1, description="Modulus")

    class Config:
        json_schema_extra = {"example": {"n": 1, "m": 1, "c": 3}}


class ExpSumFactorization(BaseModel):
    """Split c1 = b1*c1', c2 = b2*c2' with b1, b2 sharing exactly the same primes."""
    b1: int = Field(..., ge=1)
    b2: int = Field(..., ge=1)
    c1_prime: int = Field(..., ge=1)
    c2_prime: int = Field(..., ge=1)

    @model_validator(mode="after")
    def check_conditions(self) -> "ExpSumFactorization":
        if gcd(self.b1, self.c1_prime) != 1 or gcd(self.b2, self.c2_prime) != 1:
            raise ValueError("b_i must be coprime to c_i'")
        if gcd(self.c1_prime, self.c2_prime) != 1:
            raise ValueError("c1' and c2' must be coprime")
        if set(primefactors(self.b1)) != set(primefactors(self.b2)):
            raise ValueError("b1 and b2 must have the same prime divisors")
        return self

    @property
    def c1(self) -> int:
        return self.b1 * self.c1_prime

    @property
    def c2(self) -> int:
        return self.b2 * self.c2_prime


class PoissonComparison(BaseModel):
    """Direct sum against the zero-frequency Poisson term."""
    case: str = Field(..., description="Name of the periodic test function")
    N: int = Field(..., ge=1)
    period: int = Field(..., ge=1)
    direct_re: float
    direct_im: float
    main_re: float
    main_im: float
    error: float


class ExpSumScanRow(BaseModel):
    """One row of the complete exponential sum scan."""
    kind: str = Field(..., description="s1, s2 or s3")
    modulus: int
    r1: Optional[int] = None
    b2: Optional[int] = None
    t: Optional[int] = None
    m: Optional[int] = None
    re: float
    im: float
    is_square: bool
    predicted: float = Field(..., description="Closed-form value the sum should take")
    passes_bound: bool
