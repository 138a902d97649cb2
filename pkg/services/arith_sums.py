"""Kloosterman sums, the complete exponential sums of the error-term analysis,
elementary arithmetic functions and a Poisson-summation comparator.

Everything here is a pure function. Kloosterman sums are evaluated by unit
enumeration with cached inverse tables, vectorized over residues with numpy.
"""

import logging
import math
from functools import lru_cache
from math import gcd, isqrt
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.integrate import quad
from sympy import factorint, primerange, totient

from core.errors import InputValidationError, InvariantViolationError
from schemas.sums import ExpSumFactorization, ExpSumScanRow, PoissonComparison
from services.special_fn import bump_weight


logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# Elementary arithmetic functions

def tau(n: int) -> int:
    """Number of divisors of ``n``."""
    if n < 1:
        raise InputValidationError(f"tau needs n >= 1, got {n}")
    return math.prod(e + 1 for e in factorint(n).values())


def moebius(n: int) -> int:
    if n < 1:
        raise InputValidationError(f"moebius needs n >= 1, got {n}")
    exponents = factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def sigma(k: int, n: int) -> int:
    """Sum of the k-th powers of the divisors of ``n``."""
    if n < 1:
        raise InputValidationError(f"sigma needs n >= 1, got {n}")
    if k == 0:
        return tau(n)
    result = 1
    for p, e in factorint(n).items():
        pk = p ** k
        result *= (pk ** (e + 1) - 1) // (pk - 1)
    return result


def euler_phi(n: int) -> int:
    return int(totient(n))


def ramanujan_sum(c: int, m: int) -> int:
    """c_c(m) = sum over d | (c, m) of mu(c/d) d."""
    g = gcd(c, m) if m else c
    total = 0
    for d in range(1, isqrt(g) + 1):
        if g % d:
            continue
        total += moebius(c // d) * d
        e = g // d
        if e != d:
            total += moebius(c // e) * e
    return total


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def divisor_count_table(limit: int) -> np.ndarray:
    """tau(n) for 0 <= n <= limit (index 0 unused)."""
    table = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        table[d::d] += 1
    return table


def moebius_table(limit: int) -> np.ndarray:
    """mu(n) for 0 <= n <= limit (index 0 unused)."""
    table = np.ones(limit + 1, dtype=np.int64)
    table[0] = 0
    for p in primerange(2, limit + 1):
        table[p::p] *= -1
        table[p * p::p * p] = 0
    return table


# Kloosterman sums

@lru_cache(maxsize=8192)
def _unit_table(c: int) -> Tuple[np.ndarray, np.ndarray]:
    """Units mod c and their inverses; the modulus 1 has the single residue 0."""
    if c == 1:
        zero = np.zeros(1, dtype=np.int64)
        return zero, zero
    units = [b for b in range(1, c) if gcd(b, c) == 1]
    inverses = [pow(b, -1, c) for b in units]
    return np.array(units, dtype=np.int64), np.array(inverses, dtype=np.int64)


def _check_modulus(c: int) -> None:
    if c < 1:
        raise InputValidationError(f"Modulus must be >= 1, got {c}")


def kloosterman_complex(n: int, m: int, c: int) -> complex:
    """S(n, m; c) without discarding the (vanishing) imaginary part."""
    _check_modulus(c)
    units, inverses = _unit_table(c)
    phase = ((n % c) * units + (m % c) * inverses) % c
    angle = TWO_PI * phase / c
    return complex(np.cos(angle).sum(), np.sin(angle).sum())


def kloosterman(n: int, m: int, c: int) -> float:
    """Real Kloosterman sum S(n, m; c) by unit enumeration."""
    value = kloosterman_complex(n, m, c)
    if abs(value.imag) > 1e-10 * max(1.0, math.sqrt(c)):
        raise InvariantViolationError(
            f"Kloosterman sum S({n},{m};{c}) has imaginary part {value.imag:.3e}"
        )
    return value.real


def kloosterman_matrix(ns: np.ndarray, ms: np.ndarray, c: int) -> np.ndarray:
    """S(n, m; c) for every pair from ``ns`` x ``ms`` as a float array."""
    _check_modulus(c)
    units, inverses = _unit_table(c)
    n_res = (np.asarray(ns, dtype=np.int64) % c)[:, None, None]
    m_res = (np.asarray(ms, dtype=np.int64) % c)[None, :, None]
    phase = (n_res * units[None, None, :] + m_res * inverses[None, None, :]) % c
    return np.cos(TWO_PI * phase / c).sum(axis=2)


def kloosterman_split(n: int, m: int, c1: int, c2: int) -> Tuple[float, float]:
    """Factors of S(n, m; c1 c2) for coprime moduli."""
    _check_modulus(c1)
    _check_modulus(c2)
    if gcd(c1, c2) != 1:
        raise InputValidationError(f"Moduli {c1} and {c2} are not coprime")
    c2_bar = pow(c2, -1, c1) if c1 > 1 else 0
    c1_bar = pow(c1, -1, c2) if c2 > 1 else 0
    return (
        kloosterman(n, m * c2_bar * c2_bar, c1),
        kloosterman(n, m * c1_bar * c1_bar, c2),
    )


def weil_bound(n: int, m: int, c: int) -> float:
    return tau(c) * math.sqrt(c) * math.sqrt(gcd(gcd(n, m), c))


def weil_check(n: int, m: int, c: int) -> bool:
    """True when |S(n, m; c)| respects the Weil bound."""
    return abs(kloosterman(n, m, c)) <= weil_bound(n, m, c) + 1e-9


def weil_average(m: int, c: int, x: int) -> Dict[str, float]:
    """Sum of |S(n, m; c)| over 1 <= n < x against the summed Weil bound."""
    _check_modulus(c)
    residues = np.arange(c)
    values = np.abs(kloosterman_matrix(residues, np.array([m]), c)[:, 0])
    ns = np.arange(1, x)
    total = math.fsum(values[ns % c])
    gcds = np.gcd(np.gcd(ns, m), c)
    bound = tau(c) * math.sqrt(c) * math.fsum(np.sqrt(gcds))
    return {"sum": total, "bound": bound, "ratio": total / bound if bound else 0.0}


# Complete exponential sums

def _residue_kloosterman(first: np.ndarray, second: int, c: int) -> np.ndarray:
    """S(first[a], second; c) for an array of first arguments."""
    return kloosterman_matrix(first, np.array([second]), c)[:, 0]


def s1_sum(c2p: int, r1: int, b2: int) -> complex:
    """Normalized sum over a mod c2' of S(a^2, r1^2 b2bar^2; c2') e(2 a r1 b2bar / c2')."""
    _check_modulus(c2p)
    if gcd(b2, c2p) != 1:
        raise InputValidationError(f"b2={b2} is not coprime to c2'={c2p}")
    if c2p == 1:
        return 1.0 + 0.0j
    shift = (r1 * pow(b2, -1, c2p)) % c2p
    return complex(_s1_values(c2p, np.array([shift]))[0])


def _s1_values(c2p: int, shifts: np.ndarray) -> np.ndarray:
    """S1 at every shift r1 b2bar in ``shifts``, one Kloosterman sum per distinct pair of squares."""
    a = np.arange(c2p, dtype=np.int64)
    shifts = np.asarray(shifts, dtype=np.int64) % c2p
    squares, rows = np.unique((a * a) % c2p, return_inverse=True)
    shift_squares, cols = np.unique((shifts * shifts) % c2p, return_inverse=True)
    kloos = kloosterman_matrix(squares, shift_squares, c2p)[np.ix_(rows.ravel(), cols.ravel())]
    twist = np.exp(2j * np.pi * ((2 * a[:, None] * shifts[None, :]) % c2p) / c2p)
    return (kloos * twist).sum(axis=0) / c2p ** 1.5


def s1_closed_form(c2p: int) -> float:
    """phi(c)/c on perfect squares, zero elsewhere."""
    return euler_phi(c2p) / c2p if is_square(c2p) else 0.0


def s2_sum(c1p: int, t: int, m: int) -> float:
    """c1'^{-2} times the sum over a mod c1' of S(a t, m; c1')."""
    _check_modulus(c1p)
    a = np.arange(c1p, dtype=np.int64)
    return float(_residue_kloosterman((a * t) % c1p, m, c1p).sum()) / c1p ** 2


def s2_table(c1p: int, max_t: int, max_m: int) -> np.ndarray:
    """s2_sum(c1p, t, m) for 1 <= t <= max_t, 1 <= m <= max_m, indexed [t - 1, m - 1]."""
    _check_modulus(c1p)
    a = np.arange(c1p, dtype=np.int64)
    kloos = kloosterman_matrix(a, np.arange(1, max_m + 1), c1p)
    residues = (np.arange(1, max_t + 1)[:, None] * a[None, :]) % c1p
    return kloos[residues].sum(axis=1) / c1p ** 2


def s2_closed_form(c1p: int, t: int, m: int) -> float:
    if t % c1p:
        return 0.0
    return ramanujan_sum(c1p, m) / c1p


def factorization(c1: int, c2: int) -> ExpSumFactorization:
    """Move every prime dividing both moduli into b1, b2."""
    f1, f2 = factorint(c1), factorint(c2)
    common = set(f1) & set(f2)
    b1 = math.prod(p ** f1[p] for p in common)
    b2 = math.prod(p ** f2[p] for p in common)
    return ExpSumFactorization(b1=b1, b2=b2, c1_prime=c1 // b1, c2_prime=c2 // b2)


def s3_sum(b1: int, b2: int, r1: int, m: int, t: int, c1p: int, c2p: int) -> complex:
    """Mixed sum over a mod b1 b2 of the S1-type factor mod b2 and the S2-type factor mod b1."""
    try:
        ExpSumFactorization(b1=b1, b2=b2, c1_prime=c1p, c2_prime=c2p)
    except ValidationError as e:
        raise InputValidationError(f"Invalid factorization: {e.errors()[0]['msg']}") from e

    c2p_bar = pow(c2p, -1, b2) if b2 > 1 else 0
    c1p_bar = pow(c1p, -1, b1) if b1 > 1 else 0
    a = np.arange(b1 * b2, dtype=np.int64)
    shift = (r1 * c2p_bar) % b2
    first = _residue_kloosterman((a * a) % b2, (shift * shift) % b2, b2)
    first = first * np.exp(2j * np.pi * ((2 * a * shift) % b2) / b2)
    second = _residue_kloosterman((a * t) % b1, (m * c1p_bar * c1p_bar) % b1, b1)
    return complex((first * second).sum()) / (b2 ** 1.5 * b1 ** 2)


def s3_bound(b1: int, b2: int, m: int, constant: float = 4.0, eps: float = 0.1) -> float:
    return constant * b1 ** -0.5 * math.sqrt(gcd(m, b1)) * (b1 * b2) ** eps


def scan_s1(
    max_modulus: int, max_r1: int = 5, b2_values: Optional[Tuple[int, ...]] = None,
) -> List[ExpSumScanRow]:
    """S1 over c <= max_modulus, r1 <= max_r1 and b2 from ``b2_values``, or every unit mod c when None."""
    rows = []
    for c in range(1, max_modulus + 1):
        predicted = s1_closed_form(c)
        units = [b for b in range(1, c + 1) if gcd(b, c) == 1] if b2_values is None else b2_values
        params = [(r1, b2) for r1 in range(1, max_r1 + 1) for b2 in units if gcd(b2, c) == 1]
        if not params:
            continue
        if c == 1:
            values = np.ones(len(params), dtype=complex)
        else:
            values = _s1_values(c, np.array([r1 * pow(b2, -1, c) for r1, b2 in params]))
        for (r1, b2), value in zip(params, values):
            vanishing_ok = is_square(c) or abs(value) <= 1e-8 * c ** -0.5
            rows.append(ExpSumScanRow(
                kind="s1", modulus=c, r1=r1, b2=b2,
                re=value.real, im=value.imag,
                is_square=is_square(c), predicted=predicted,
                passes_bound=vanishing_ok and abs(value) <= 1 + 1e-8,
            ))
    logger.info(f"S1 scan over moduli <= {max_modulus}: {len(rows)} rows")
    return rows


def scan_s2(max_modulus: int, max_t: int = 20, max_m: int = 20) -> List[ExpSumScanRow]:
    rows = []
    for c in range(1, max_modulus + 1):
        table = s2_table(c, max_t, max_m)
        for t in range(1, max_t + 1):
            for m in range(1, max_m + 1):
                value = float(table[t - 1, m - 1])
                vanishing_ok = t % c == 0 or abs(value) <= 1e-10
                rows.append(ExpSumScanRow(
                    kind="s2", modulus=c, t=t, m=m, re=value, im=0.0,
                    is_square=is_square(c), predicted=s2_closed_form(c, t, m),
                    passes_bound=vanishing_ok and abs(value) <= 1 + 1e-10,
                ))
    logger.info(f"S2 scan over moduli <= {max_modulus}: {len(rows)} rows")
    return rows


def scan_s3(max_prime: int = 50, max_param: int = 5) -> List[ExpSumScanRow]:
    """b1 = b2 = p over primes, c1' = c2' = 1, small r1, m, t."""
    rows = []
    for p in primerange(2, max_prime + 1):
        for r1 in range(1, max_param + 1):
            for m in range(1, max_param + 1):
                for t in range(1, max_param + 1):
                    value = s3_sum(p, p, r1, m, t, 1, 1)
                    bound = s3_bound(p, p, m)
                    rows.append(ExpSumScanRow(
                        kind="s3", modulus=p, r1=r1, t=t, m=m,
                        re=value.real, im=value.imag,
                        is_square=False, predicted=bound,
                        passes_bound=abs(value) <= bound,
                    ))
    logger.info(f"S3 scan over primes <= {max_prime}: {len(rows)} rows")
    return rows


# Poisson summation

def poisson_compare(
    S: Callable[[np.ndarray], np.ndarray],
    psi: Callable[[np.ndarray], np.ndarray],
    N: int,
    c: int,
    case: str = "custom",
) -> PoissonComparison:
    """Compare sum_n S(n) psi(n/N) with its zero-frequency Poisson term."""
    _check_modulus(c)
    if N < 1:
        raise InputValidationError(f"Scale N must be >= 1, got {N}")

    n = np.arange(N + 1, 2 * N, dtype=np.int64)
    terms = np.asarray(S(n), dtype=complex) * psi(n / N)
    direct = complex(math.fsum(terms.real), math.fsum(terms.imag))

    psi_hat0, _ = quad(lambda u: float(psi(np.array([u]))[0]), 1.0, 2.0, epsabs=1e-15, epsrel=1e-14, limit=200)
    residues = np.asarray(S(np.arange(c, dtype=np.int64)), dtype=complex)
    period_sum = complex(math.fsum(residues.real), math.fsum(residues.imag))
    main = psi_hat0 * (N / c) * period_sum

    return PoissonComparison(
        case=case, N=N, period=c,
        direct_re=direct.real, direct_im=direct.imag,
        main_re=main.real, main_im=main.imag,
        error=abs(direct - main),
    )


def _kloosterman_square_table(c: int) -> Callable[[np.ndarray], np.ndarray]:
    table = np.array([kloosterman((a * a) % c, 1, c) for a in range(c)])
    return lambda n: table[np.asarray(n) % c]


def poisson_cases() -> Dict[str, Tuple[Callable, int, int]]:
    """Named periodic functions with their period and scale."""
    return {
        "constant": (lambda n: np.ones(len(n)), 1, 1000),
        "character": (lambda n: np.exp(2j * np.pi * (np.asarray(n) % 7) / 7), 7, 1000),
        "kloosterman": (_kloosterman_square_table(7), 7, 2000),
    }


def run_poisson_cases(selected: str = "all") -> List[PoissonComparison]:
    results = []
    for name, (fn, period, scale) in poisson_cases().items():
        if selected not in ("all", name):
            continue
        results.append(poisson_compare(fn, bump_weight, scale, period, case=name))
    if not results:
        raise InputValidationError(f"Unknown Poisson case: {selected}")
    return results
