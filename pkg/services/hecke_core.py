"""Exact cusp-form spaces on SL2(Z).

q-expansions are exact (``Fraction`` coefficients, big-integer products through
sympy polynomials over ZZ). Eigenforms come from a working-precision
eigen-decomposition of the exact T2 matrix; their Deligne-normalized
coefficients are kept both as mpmath numbers and as a float64 table.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath as mp
import numpy as np
from sympy import Matrix, Poly, Symbol, ZZ, bernoulli, factorint, gcd as poly_gcd

from core.config import settings
from core.errors import (
    BudgetError,
    ConvergenceError,
    InputValidationError,
    InvariantViolationError,
    TruncationError,
)


logger = logging.getLogger(__name__)

_q = Symbol("q")
_x = Symbol("x")

Rational = Union[int, Fraction]


def _integer_product(a: Sequence[int], b: Sequence[int], n: int) -> List[int]:
    """Coefficients 0..n of the product of two integer power series."""
    pa = Poly.from_list(list(reversed(a[: n + 1])), _q, domain=ZZ)
    pb = Poly.from_list(list(reversed(b[: n + 1])), _q, domain=ZZ)
    coeffs = [int(c) for c in reversed((pa * pb).all_coeffs())]
    coeffs = coeffs[: n + 1]
    return coeffs + [0] * (n + 1 - len(coeffs))


def _clear_denominators(coeffs: Sequence[Fraction]) -> Tuple[List[int], int]:
    denominator = math.lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    return [c.numerator * (denominator // c.denominator) for c in coeffs], denominator


@dataclass(frozen=True)
class QSeries:
    """Exact q-expansion c(0) + c(1) q + ... + c(N) q^N of a weight-``weight`` form."""

    weight: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.weight < 0 or self.weight % 2:
            raise InputValidationError(f"QSeries weight must be even and non-negative, got {self.weight}")
        if not self.coeffs:
            raise InputValidationError("QSeries needs at least the constant coefficient")

    @classmethod
    def from_values(cls, weight: int, values: Sequence[Rational]) -> "QSeries":
        return cls(weight, tuple(Fraction(v) for v in values))

    @classmethod
    def one(cls, truncation: int) -> "QSeries":
        return cls.from_values(0, [1] + [0] * truncation)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        if n > self.truncation:
            raise TruncationError(f"Coefficient {n} requested from a series truncated at {self.truncation}")
        return self.coeffs[n]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def integers(self) -> List[int]:
        if not self.is_integral():
            raise InvariantViolationError("Series has non-integral coefficients")
        return [c.numerator for c in self.coeffs]

    def _common(self, other: "QSeries") -> int:
        if self.weight != other.weight:
            raise InputValidationError(f"Cannot add weights {self.weight} and {other.weight}")
        return min(self.truncation, other.truncation)

    def __add__(self, other: "QSeries") -> "QSeries":
        n = self._common(other)
        return QSeries(self.weight, tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])))

    def __sub__(self, other: "QSeries") -> "QSeries":
        n = self._common(other)
        return QSeries(self.weight, tuple(a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])))

    def __neg__(self) -> "QSeries":
        return QSeries(self.weight, tuple(-c for c in self.coeffs))

    def scale(self, factor: Rational) -> "QSeries":
        factor = Fraction(factor)
        return QSeries(self.weight, tuple(factor * c for c in self.coeffs))

    def __mul__(self, other: Union["QSeries", Rational]) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        n = min(self.truncation, other.truncation)
        a, da = _clear_denominators(self.coeffs[: n + 1])
        b, db = _clear_denominators(other.coeffs[: n + 1])
        product = _integer_product(a, b, n)
        denominator = da * db
        return QSeries(self.weight + other.weight, tuple(Fraction(c, denominator) for c in product))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QSeries":
        if exponent < 0:
            raise InputValidationError("Negative powers of q-series are not supported")
        result = QSeries.one(self.truncation)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result


# Building blocks

def _pentagonal_terms(limit: int) -> List[Tuple[int, int]]:
    """Nonzero coefficients (i, p_i), 1 <= i <= limit, of prod (1 - q^n)."""
    terms = []
    j = 1
    while j * (3 * j - 1) // 2 <= limit:
        sign = -1 if j % 2 else 1
        for exponent in (j * (3 * j - 1) // 2, j * (3 * j + 1) // 2):
            if exponent <= limit:
                terms.append((exponent, sign))
        j += 1
    return sorted(terms)


def eta_power(e: int, N: int) -> List[int]:
    """Coefficients 0..N of prod_{n>=1} (1 - q^n)^e.

    Uses n f_n = sum_i ((e+1) i - n) p_i f_{n-i} over the sparse pentagonal series.
    """
    if N < 0:
        raise InputValidationError(f"Truncation must be >= 0, got {N}")
    terms = _pentagonal_terms(N)
    f = [0] * (N + 1)
    f[0] = 1
    for n in range(1, N + 1):
        acc = 0
        for i, p in terms:
            if i > n:
                break
            acc += ((e + 1) * i - n) * p * f[n - i]
        f[n], remainder = divmod(acc, n)
        if remainder:
            raise InvariantViolationError(f"Non-integral eta power coefficient at q^{n}")
    return f


def delta_power(j: int, N: int) -> QSeries:
    """Delta^j = q^j prod (1 - q^n)^(24 j), truncated at N."""
    coeffs = [0] * (N + 1)
    if j <= N:
        body = eta_power(24 * j, N - j)
        coeffs[j:] = body
    return QSeries.from_values(12 * j, coeffs)


def delta(N: int) -> QSeries:
    """Ramanujan's Delta, truncated at N."""
    if N < 1:
        raise InputValidationError(f"Truncation must be >= 1, got {N}")
    return delta_power(1, N)


def _divisor_power_sums(power: int, N: int) -> List[int]:
    sums = [0] * (N + 1)
    for d in range(1, N + 1):
        dk = d ** power
        for m in range(d, N + 1, d):
            sums[m] += dk
    return sums


def eisenstein(k: int, N: int) -> QSeries:
    """Normalized Eisenstein series E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise InputValidationError(f"Eisenstein series need even k >= 4, got {k}")
    if N < 1:
        raise InputValidationError(f"Truncation must be >= 1, got {N}")
    b = bernoulli(k)
    factor = Fraction(-2 * k) / Fraction(int(b.p), int(b.q))
    sums = _divisor_power_sums(k - 1, N)
    return QSeries(k, (Fraction(1),) + tuple(factor * sums[n] for n in range(1, N + 1)))


def cusp_dimension(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    d = k // 12 - 1 if k % 12 == 2 else k // 12
    return max(d, 0)


def default_budget(weight: int) -> int:
    """Coefficient budget max(4k^2, floor), with weight-2k partners sized by k."""
    base = weight if weight <= 40 else weight // 2
    return max(4 * base * base, settings.coefficient_floor)


# Spaces

@dataclass(frozen=True)
class CuspSpace:
    """S_k(SL2(Z)) in Victor Miller form g_i = q^i + O(q^{d+1})."""

    weight: int
    dimension: int
    basis: Tuple[QSeries, ...]
    truncation: int

    @cached_property
    def rows(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(g.integers()) for g in self.basis)


def victor_miller_basis(k: int, N: int) -> CuspSpace:
    """Echelonized integral basis from Delta^j E_{k-12j}, j = 1..d."""
    if k < 12 or k % 2:
        raise InputValidationError(f"Cusp spaces need even k >= 12, got {k}")
    d = cusp_dimension(k)
    if d == 0:
        return CuspSpace(k, 0, (), N)
    if N <= d:
        raise TruncationError(f"Truncation {N} too small to echelonize a space of dimension {d}")

    logger.info(f"Building Victor Miller basis for k={k}, d={d}, N={N}")
    rows: List[List[Fraction]] = []
    for j in range(1, d + 1):
        w = k - 12 * j
        product = delta_power(j, N)
        if w > 0:
            product = product * eisenstein(w, N)
        rows.append(list(product.coeffs))

    for i in range(d - 1, -1, -1):
        for j in range(i + 1, d):
            factor = rows[i][j + 1]
            if factor:
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[j])]

    basis = tuple(QSeries(k, tuple(row)) for row in rows)
    for i, g in enumerate(basis):
        if not g.is_integral():
            raise InvariantViolationError(f"Victor Miller basis element {i + 1} of weight {k} is not integral")
        for j in range(1, d + 1):
            if g[j] != (1 if j == i + 1 else 0):
                raise InvariantViolationError(f"Basis element {i + 1} of weight {k} is not in echelon form")
    return CuspSpace(k, d, basis, N)


def hecke_matrix(space: CuspSpace, n: int) -> Matrix:
    """Exact matrix of T_n; column i holds the coordinates of T_n g_i."""
    if n < 1:
        raise InputValidationError(f"Hecke index must be >= 1, got {n}")
    d = space.dimension
    if space.truncation < n * d:
        raise TruncationError(
            f"T_{n} on weight {space.weight} needs coefficients up to {n * d}, have {space.truncation}"
        )
    k = space.weight
    entries = [[0] * d for _ in range(d)]
    for i, row in enumerate(space.rows):
        for m in range(1, d + 1):
            g = math.gcd(n, m)
            entries[m - 1][i] = sum(
                delta_ ** (k - 1) * row[n * m // (delta_ * delta_)]
                for delta_ in range(1, g + 1)
                if g % delta_ == 0
            )
    return Matrix(entries)


def charpoly_coefficients(matrix: Matrix) -> Tuple[int, ...]:
    """Integer characteristic polynomial, highest degree first."""
    return tuple(int(c) for c in matrix.charpoly(_x).all_coeffs())


# Eigenforms

@dataclass(frozen=True)
class Eigenform:
    """Normalized Hecke eigenform with coefficients a_f(n) = lambda_f(n) / n^((k-1)/2)."""

    weight: int
    label: int
    charpoly2: Tuple[int, ...]
    eigenvector: Tuple[mp.mpf, ...]
    lam: Tuple[mp.mpf, ...]
    a_mp: Tuple[mp.mpf, ...]
    a: np.ndarray = field(repr=False, compare=False)

    @property
    def budget(self) -> int:
        return len(self.lam) - 1

    @property
    def lambda2(self) -> mp.mpf:
        return self.lam[2]

    def coefficient(self, n: int) -> float:
        """a_f(n) as a float, extending past the table multiplicatively."""
        if n < 1:
            raise InputValidationError(f"Coefficient index must be >= 1, got {n}")
        if n <= self.budget:
            return float(self.a[n])
        value = 1.0
        for p, e in factorint(n).items():
            value *= self._prime_power(p, e)
        return value

    def coefficient_mp(self, n: int) -> mp.mpf:
        if n < 1:
            raise InputValidationError(f"Coefficient index must be >= 1, got {n}")
        if n <= self.budget:
            return self.a_mp[n]
        value = mp.mpf(1)
        for p, e in factorint(n).items():
            if p > self.budget:
                raise BudgetError(f"a_f({p}) lies beyond the coefficient budget {self.budget}")
            prev, cur = mp.mpf(1), self.a_mp[p]
            for _ in range(e - 1):
                prev, cur = cur, self.a_mp[p] * cur - prev
            value *= cur
        return value

    def _prime_power(self, p: int, e: int) -> float:
        if p ** e <= self.budget:
            return float(self.a[p ** e])
        if p > self.budget:
            raise BudgetError(f"a_f({p}) lies beyond the coefficient budget {self.budget}")
        ap = float(self.a[p])
        prev, cur = 1.0, ap
        for _ in range(e - 1):
            prev, cur = cur, ap * cur - prev
        return cur

    def a_squares(self, M: int) -> np.ndarray:
        """a_f(m^2) for 0 <= m <= M (index 0 unused)."""
        values = np.zeros(M + 1)
        for m in range(1, M + 1):
            if m * m <= self.budget:
                values[m] = self.a[m * m]
            else:
                values[m] = math.prod(self._prime_power(p, 2 * e) for p, e in factorint(m).items())
        return values

    def sym2_table(self, M: int) -> np.ndarray:
        """A_f(n, 1) = sum over d^2 | n of a_f((n/d^2)^2), for 0 <= n <= M."""
        squares = self.a_squares(M)
        table = np.zeros(M + 1)
        d = 1
        while d * d <= M:
            step = d * d
            table[step::step] += squares[1 : M // step + 1]
            d += 1
        return table


def _moebius_small(n: int) -> int:
    exponents = factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def gl3_from_table(sym2: np.ndarray, n: int, r: int) -> float:
    """A_f(n, r) from a table of A_f(., 1)."""
    g = math.gcd(n, r)
    total = 0.0
    for d in range(1, g + 1):
        if g % d == 0:
            mu = _moebius_small(d)
            if mu:
                total += mu * sym2[n // d] * sym2[r // d]
    return total


def gl3_coeff(f: Eigenform, n: int, r: int) -> float:
    """Symmetric-square lift coefficient A_f(n, r)."""
    if n < 1 or r < 1:
        raise InputValidationError(f"GL(3) indices must be >= 1, got ({n}, {r})")
    return gl3_from_table(f.sym2_table(max(n, r)), n, r)


def _check_simple_spectrum(charpoly: Tuple[int, ...], weight: int) -> None:
    p = Poly(list(charpoly), _x, domain=ZZ)
    if p.degree() > 1 and poly_gcd(p, p.diff(_x)).degree() > 0:
        raise ConvergenceError(f"T_2 on weight {weight} has a repeated eigenvalue")


def _residual(matrix: Matrix, vector: List[mp.mpf]) -> Tuple[mp.mpf, mp.mpf]:
    d = len(vector)
    image = [mp.fsum(mp.mpf(int(matrix[i, j])) * vector[j] for j in range(d)) for i in range(d)]
    eigenvalue = image[0]
    residual = mp.sqrt(mp.fsum((image[i] - eigenvalue * vector[i]) ** 2 for i in range(d)))
    return eigenvalue, residual


def eigenforms(space: CuspSpace, budget: Optional[int] = None) -> List[Eigenform]:
    """Hecke eigenbasis of ``space`` sorted by lambda_f(2) ascending."""
    d = space.dimension
    if d < 1:
        raise InputValidationError(f"Weight {space.weight} has no cusp forms")
    budget = min(budget or space.truncation, space.truncation)
    k = space.weight

    t2 = hecke_matrix(space, 2)
    charpoly = charpoly_coefficients(t2)
    _check_simple_spectrum(charpoly, k)

    checks: Dict[int, Matrix] = {n: hecke_matrix(space, n) for n in (3, 5) if space.truncation >= n * d}

    forms = []
    with mp.workdps(settings.working_digits + 20):
        A = mp.matrix([[mp.mpf(int(t2[i, j])) for j in range(d)] for i in range(d)])
        values, vectors = mp.eig(A)
        order = sorted(range(d), key=lambda idx: mp.re(values[idx]))
        half_weight = mp.mpf(k - 1) / 2
        for label, idx in enumerate(order):
            lead = mp.re(vectors[0, idx])
            vector = [mp.re(vectors[i, idx]) / lead for i in range(d)]
            norm = mp.sqrt(mp.fsum(v * v for v in vector))
            for n, matrix in checks.items():
                _, residual = _residual(matrix, vector)
                if residual > mp.mpf("1e-20") * norm:
                    raise ConvergenceError(f"T_{n} residual {mp.nstr(residual, 5)} for weight {k} form {label}")

            lam = [mp.mpf(0)] * (budget + 1)
            for n in range(1, budget + 1):
                lam[n] = mp.fsum(vector[i] * space.rows[i][n] for i in range(d))
            a_mp = [mp.mpf(0)] + [lam[n] / mp.power(n, half_weight) for n in range(1, budget + 1)]
            forms.append(Eigenform(
                weight=k,
                label=label,
                charpoly2=charpoly,
                eigenvector=tuple(vector),
                lam=tuple(lam),
                a_mp=tuple(a_mp),
                a=np.array([float(v) for v in a_mp]),
            ))

    for f in forms:
        for n, m in ((2, 2), (2, 3), (3, 3)):
            if max(n * m, n, m) > f.budget:
                continue
            lhs = f.a_mp[n] * f.a_mp[m]
            rhs = mp.fsum(f.a_mp[n * m // (e * e)] for e in range(1, math.gcd(n, m) + 1) if math.gcd(n, m) % e == 0)
            if abs(lhs - rhs) > 1e-15:
                raise InvariantViolationError(f"Hecke relation fails for weight {k} form {f.label} at ({n},{m})")

    logger.info(f"Computed {d} eigenforms of weight {k} with budget {budget}")
    return forms
