"""Gamma-factor ratios, cutoff functions and the L-values built from them.

Every smoothed sum here is a Mellin contour integral
(1/2 pi i) int R(s) xi^{-s} ds/s evaluated on Re s = sigma by composite
Gauss-Legendre quadrature on t in [0, T]; conjugate symmetry of R halves the
contour. Gamma arithmetic goes through log-gamma differences only.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import mpmath as mp
import numpy as np

from core.config import settings
from core.errors import BudgetError, InputValidationError, PoleError
from schemas.lvalues import BumpResult, LValue, LValueKind, MainTermResult
from services.arith_sums import moebius_table
from services.hecke_core import Eigenform, default_budget, gl3_from_table
from services.special_fn import log_gamma_mp


logger = logging.getLogger(__name__)

T_MAX = 4000.0
LEFT_SIGMA = -0.5


# Gamma ratios

def _log_ratio(k: int, j: int, s) -> mp.mpc:
    if j == 1:
        return -s * mp.log(2 * mp.pi) + log_gamma_mp(k + s) - log_gamma_mp(k)
    if j == 2:
        return (
            -3 * s * mp.log(2 * mp.pi)
            + log_gamma_mp(2 * k - 1 + s) - log_gamma_mp(2 * k - 1)
            + log_gamma_mp(k + s) - log_gamma_mp(k)
            + log_gamma_mp(1 + s)
        )
    raise InputValidationError(f"Degree index j must be 1 or 2, got {j}")


def lambda_ratio(k: int, j: int, s: complex) -> complex:
    """Lambda_{k,j}(1/2 + s) / Lambda_{k,j}(1/2)."""
    with mp.workdps(30):
        return complex(mp.exp(_log_ratio(k, j, mp.mpmathify(s))))


def _log_sym2_gamma(k: int, s) -> mp.mpc:
    """log of pi^{-3s/2} Gamma((s+1)/2) Gamma((s+k-1)/2) Gamma((s+k)/2)."""
    return (
        -1.5 * s * mp.log(mp.pi)
        + log_gamma_mp((s + 1) / 2)
        + log_gamma_mp((s + k - 1) / 2)
        + log_gamma_mp((s + k) / 2)
    )


# Mellin kernels

@dataclass(frozen=True)
class AFEWeights:
    """Contour configuration for a cutoff function."""

    k: int
    j: int
    sigma: float = 1.5
    T: Optional[float] = None
    step: float = 0.5
    order: int = 16

    def __post_init__(self) -> None:
        if self.j not in (1, 2):
            raise InputValidationError(f"Degree index j must be 1 or 2, got {self.j}")
        if self.sigma == 0:
            raise InputValidationError("The contour must avoid s = 0")

    @property
    def height(self) -> float:
        return self.T if self.T is not None else 30.0 + 10.0 * math.log(self.k)


class MellinKernel:
    """W(xi) = (1/2 pi i) int_{(sigma)} R(s) G(s) xi^{-s} ds/s for a real-symmetric R."""

    def __init__(
        self,
        log_ratio: Callable[[mp.mpc], mp.mpc],
        sigma: float,
        height: float,
        step: float,
        order: int,
        gauss_damping: float = 0.0,
        tail_tol: float = 1e-18,
    ):
        self.sigma = sigma
        self.gauss_damping = gauss_damping
        with mp.workdps(30):
            base = abs(mp.exp(log_ratio(mp.mpf(sigma))))
            T = height
            while self._magnitude(log_ratio, T) > tail_tol * max(base, 1e-300):
                T *= 1.5
                if T > T_MAX:
                    raise BudgetError(f"Contour height beyond {T_MAX} needed for tail {tail_tol}")
            self.height = T
            self.tail = self._magnitude(log_ratio, T)

            panels = int(math.ceil(T / step))
            x, w = np.polynomial.legendre.leggauss(order)
            edges = np.linspace(0.0, T, panels + 1)
            half = (edges[1:] - edges[:-1]) / 2.0
            mid = (edges[1:] + edges[:-1]) / 2.0
            self.t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
            self.w = (half[:, None] * w[None, :]).ravel()
            values = [
                complex(mp.exp(log_ratio(mp.mpc(sigma, t)) + gauss_damping * mp.mpc(sigma, t) ** 2))
                for t in self.t
            ]
        self.s = sigma + 1j * self.t
        self.coefficient = np.array(values) / self.s

    def _magnitude(self, log_ratio, T: float) -> float:
        s = mp.mpc(self.sigma, T)
        return float(abs(mp.exp(log_ratio(s) + self.gauss_damping * s * s)))

    def __call__(self, xi) -> np.ndarray:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty(len(xi))
        log_xi = np.log(xi)
        for start in range(0, len(xi), 256):
            chunk = log_xi[start : start + 256]
            phases = np.exp(-np.outer(chunk, self.s))
            out[start : start + 256] = (phases * self.coefficient[None, :]).real @ self.w / math.pi
        return out

    def tail_estimate(self, xi: float) -> float:
        return self.tail * xi ** -self.sigma / self.height


@lru_cache(maxsize=64)
def _cutoff_kernel(k: int, j: int, sigma: float, step: float, order: int, damping: float, T: Optional[float]) -> MellinKernel:
    weights = AFEWeights(k=k, j=j, sigma=sigma, T=T, step=step, order=order)
    return MellinKernel(lambda s: _log_ratio(k, j, s), sigma, weights.height, step, order, damping)


def v_weights(k: int, j: int, xi, sigma: Optional[float] = None, damping: float = 0.0) -> np.ndarray:
    """V_{k,j} at an array of xi > 0.

    The default contour is Re s = afe_sigma for xi >= 1; smaller xi use
    Re s = -1/2 plus the residue 1 at s = 0.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi <= 0):
        raise InputValidationError("V needs xi > 0")
    step, order = settings.afe_step, settings.afe_order

    if sigma is not None:
        kernel = _cutoff_kernel(k, j, float(sigma), step, order, damping, None)
        values = kernel(xi)
        return values + 1.0 if sigma < 0 else values

    out = np.empty(len(xi))
    right = xi >= 1.0
    if right.any():
        out[right] = _cutoff_kernel(k, j, settings.afe_sigma, step, order, damping, None)(xi[right])
    if (~right).any():
        out[~right] = 1.0 + _cutoff_kernel(k, j, LEFT_SIGMA, step, order, damping, None)(xi[~right])
    return out


def v_weight(k: int, j: int, xi: float, sigma: Optional[float] = None) -> float:
    """V_{k,j}(xi)."""
    if xi <= 0:
        raise InputValidationError(f"V needs xi > 0, got {xi}")
    return float(v_weights(k, j, [xi], sigma)[0])


def _growth(j: int) -> float:
    return 1.0 if j == 1 else 2.0 * math.pi ** 2 / 6.0


def tail_model(k: int, j: int, v_at_cutoff: float, cutoff: float) -> float:
    """Truncation tail 4 V(M) K (1 + M/K) / (A - 1), K = k^j, from the polynomial decay of V."""
    A = settings.tail_exponent
    K = float(k ** j)
    return 4.0 * v_at_cutoff * K * (1.0 + cutoff / K) / (A - 1.0) * _growth(j)


def cutoff_length(k: int, j: int, tol: float, damping: float = 0.0) -> Tuple[int, float]:
    """Smallest M on a geometric grid whose tail model stays below ``tol`` for the next three grid points."""
    grid = 1.1 ** np.arange(1, 220)
    values = np.abs(v_weights(k, j, grid, damping=damping))
    tails = np.array([tail_model(k, j, v, xi) for v, xi in zip(values, grid)])
    below = tails <= tol
    for i in range(len(grid) - 3):
        if below[i : i + 4].all():
            return int(math.ceil(grid[i])), float(tails[i])
    raise BudgetError(f"No cutoff found for V_{{{k},{j}}} at tolerance {tol}")


# Central values

def _check_pair_weights(f_weight: int, g: Eigenform) -> None:
    if g.weight != 2 * f_weight:
        raise InputValidationError(f"Partner form must have weight {2 * f_weight}, got {g.weight}")


def central_value_g(g: Eigenform, k: int, tol: float = 1e-8, damping: float = 0.0, M: Optional[int] = None) -> LValue:
    """L(1/2, g) = 2 sum a_g(m) m^{-1/2} V_{k,1}(m) for g of weight 2k."""
    _check_pair_weights(k, g)
    cutoff, tail = cutoff_length(k, 1, tol, damping)
    if M is not None:
        cutoff = M
        tail = tail_model(k, 1, abs(v_weights(k, 1, [M], damping=damping)[0]), M)
    m = np.arange(1, cutoff + 1)
    coefficients = np.array([g.coefficient(int(i)) for i in m])
    terms = coefficients / np.sqrt(m) * v_weights(k, 1, m, damping=damping)
    return LValue(
        kind=LValueKind.CENTRAL_G, k=g.weight, label=g.label,
        value=2.0 * math.fsum(terms), truncation=cutoff, tail_bound=tail,
    )


def _pair_indices(limit: int):
    """All (n, r) with n r^2 <= limit."""
    for r in range(1, math.isqrt(limit) + 1):
        for n in range(1, limit // (r * r) + 1):
            yield n, r


def central_value_sym2xg(f: Eigenform, g: Eigenform, tol: float = 1e-8, damping: float = 0.0, N2: Optional[int] = None) -> LValue:
    """L(1/2, sym^2 f x g) = 2 sum A_f(n, r) a_g(n) (n r^2)^{-1/2} V_{k,2}(n r^2)."""
    k = f.weight
    _check_pair_weights(k, g)
    cutoff, tail = cutoff_length(k, 2, tol, damping)
    if N2 is not None:
        cutoff = N2
        tail = tail_model(k, 2, abs(v_weights(k, 2, [N2], damping=damping)[0]), N2)

    sym2 = f.sym2_table(cutoff)
    a_g = np.array([0.0] + [g.coefficient(n) for n in range(1, cutoff + 1)])
    v = np.concatenate([[0.0], v_weights(k, 2, np.arange(1, cutoff + 1), damping=damping)])
    terms = [
        gl3_from_table(sym2, n, r) * a_g[n] / (r * math.sqrt(n)) * v[n * r * r]
        for n, r in _pair_indices(cutoff)
    ]
    return LValue(
        kind=LValueKind.CENTRAL_SYM2XG, k=k, label=f.label, g_label=g.label,
        value=2.0 * math.fsum(terms), truncation=cutoff, tail_bound=tail,
    )


ORACLE_DAMPING = 0.01


def central_value_g_oracle(g: Eigenform, k: int, tol: float = 1e-8) -> LValue:
    """L(1/2, g) again, with the even smoothing G(s) = e^{delta s^2}, delta = ORACLE_DAMPING, inside the cutoff.

    Any even G with G(0) = 1 gives the same value.
    """
    return central_value_g(g, k, tol, damping=ORACLE_DAMPING)


def central_value_sym2xg_oracle(f: Eigenform, g: Eigenform, tol: float = 1e-8) -> LValue:
    return central_value_sym2xg(f, g, tol, damping=ORACLE_DAMPING)


# Edge values

EDGE_SPAN = 24.0


def _check_scale(X: float) -> None:
    if X < 100:
        raise InputValidationError(f"Smoothing scale X must be >= 100, got {X}")


def edge_budget(weight: int, X: float) -> int:
    """Coefficient budget for the edge series at scale X: e^{-n/X} is below e^{-24} past n = 24 X."""
    _check_scale(X)
    budget = max(default_budget(weight), int(math.ceil(EDGE_SPAN * X)))
    if budget > settings.coefficient_ceiling:
        raise BudgetError(
            f"Smoothing scale X={X} needs a budget of {budget} coefficients, ceiling is {settings.coefficient_ceiling}"
        )
    return budget


def _edge_length(f: Eigenform, X: float) -> int:
    _check_scale(X)
    length = int(math.ceil(EDGE_SPAN * X))
    if length > f.budget:
        raise BudgetError(
            f"Smoothing scale X={X} needs a_f(p) for p <= {length}, budget is {f.budget}"
        )
    return length


def edge_sym2(f: Eigenform, X: float) -> LValue:
    """Smoothed series sum A_f(n, 1) n^{-1} e^{-n/X}; error model X^{-1/2}."""
    length = _edge_length(f, X)
    n = np.arange(1, length + 1)
    terms = f.sym2_table(length)[1:] / n * np.exp(-n / X)
    return LValue(
        kind=LValueKind.EDGE_SYM2, k=f.weight, label=f.label,
        value=math.fsum(terms), truncation=length, tail_bound=X ** -0.5, scale=X,
    )


def edge_sym2_inverse(f: Eigenform, X: float) -> LValue:
    """Smoothed series for 1 / L(1, sym^2 f) over (d1, d2, d3) with d1 d2^2 d3^3 squarefree-supported."""
    length = _edge_length(f, X)
    mu = moebius_table(length)
    squares = f.a_squares(length)
    terms = []
    for d3 in range(1, int(round(length ** (1.0 / 3.0))) + 2):
        if d3 ** 3 > length or not mu[d3]:
            continue
        for d2 in range(1, math.isqrt(length // d3 ** 3) + 1):
            if not mu[d2]:
                continue
            base = d2 * d2 * d3 ** 3
            for d1 in range(1, length // base + 1):
                sign = mu[d1 * d2 * d3]
                if not sign:
                    continue
                size = d1 * base
                terms.append(sign * mu[d2] * squares[d1 * d2] / size * math.exp(-size / X))
    return LValue(
        kind=LValueKind.EDGE_SYM2_INVERSE, k=f.weight, label=f.label,
        value=math.fsum(terms), truncation=len(terms), tail_bound=X ** -0.5, scale=X,
    )


@lru_cache(maxsize=64)
def _sym2_kernels(k: int, s0: float) -> Tuple[MellinKernel, MellinKernel]:
    step, order = settings.afe_step, settings.afe_order
    height = 30.0 + 10.0 * math.log(k)
    with mp.workdps(30):
        base = _log_sym2_gamma(k, mp.mpf(s0))
    first = MellinKernel(lambda u: _log_sym2_gamma(k, s0 + u) - base, 1.0, height, step, order)
    second = MellinKernel(lambda u: _log_sym2_gamma(k, 1 - s0 + u) - base, s0 + 0.5, height, step, order)
    return first, second


def sym2_value(f: Eigenform, s0: float = 1.0, tol: float = 1e-12) -> LValue:
    """L(s0, sym^2 f) from the functional equation of the completed degree-3 L-function."""
    first, second = _sym2_kernels(f.weight, float(s0))
    length = 16
    while True:
        if length > 200000:
            raise BudgetError(f"Symmetric-square sums for weight {f.weight} did not settle")
        edge = np.array([float(length)])
        tail = abs(first(edge)[0]) * length + abs(second(edge)[0]) * length
        if tail < tol:
            break
        length *= 2
    n = np.arange(1, length + 1)
    table = f.sym2_table(length)[1:]
    terms = table * (n ** -s0 * first(n) + n ** (s0 - 1.0) * second(n))
    return LValue(
        kind=LValueKind.EDGE_SYM2_AFE, k=f.weight, label=f.label,
        value=math.fsum(terms), truncation=length, tail_bound=tail,
    )


def sym2_euler_product(f: Eigenform, s: float, P: int) -> float:
    """Euler product of L(s, sym^2 f) over primes p <= P, for s > 1."""
    if s <= 1:
        raise InputValidationError(f"Euler product needs s > 1, got {s}")
    from sympy import primerange

    log_total = 0.0
    for p in primerange(2, P + 1):
        ap = f.coefficient(p)
        x = p ** -s
        trace = ap * ap - 2.0
        log_total -= math.log((1.0 - x) * (1.0 - trace * x + x * x))
    return math.exp(log_total)


def zeta(s: float) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin with N = 20 and ten Bernoulli terms."""
    if s == 1:
        raise PoleError("zeta has a pole at s=1")
    if s < 1:
        raise InputValidationError(f"zeta is evaluated only for s > 1, got {s}")
    with mp.workdps(30):
        s = mp.mpf(s)
        N = 20
        total = mp.fsum(mp.power(n, -s) for n in range(1, N))
        total += mp.power(N, 1 - s) / (s - 1) + mp.power(N, -s) / 2
        rising = s
        for j in range(1, 11):
            total += mp.bernoulli(2 * j) / mp.factorial(2 * j) * rising * mp.power(N, -s - 2 * j + 1)
            rising *= (s + 2 * j - 1) * (s + 2 * j)
        return float(total)


# Identities

def _prefix_sums(table: np.ndarray, exponent: float) -> np.ndarray:
    n = np.arange(len(table), dtype=float)
    n[0] = 1.0
    weighted = table / n ** exponent
    weighted[0] = 0.0
    return np.cumsum(weighted)


def bump_check(f: Eigenform, s: float, w: float, N: int) -> BumpResult:
    """sum_{n, r <= N} A_f(n, r) n^{-s} r^{-w} against L(s)L(w)/zeta(s+w)."""
    if s <= 1 or w <= 1:
        raise InputValidationError(f"Need s, w > 1, got ({s}, {w})")
    if N > f.budget:
        raise BudgetError(f"Truncation {N} exceeds the coefficient budget {f.budget}")
    table = f.sym2_table(N)
    prefix_s = _prefix_sums(table, s)
    prefix_w = _prefix_sums(table, w)
    mu = moebius_table(N)
    terms = [
        mu[d] * d ** (-s - w) * prefix_s[N // d] * prefix_w[N // d]
        for d in range(1, N + 1)
        if mu[d]
    ]
    lhs = math.fsum(terms)
    rhs = sym2_value(f, s).value * sym2_value(f, w).value / zeta(s + w)
    return BumpResult(s=s, w=w, N=N, lhs=lhs, rhs=rhs, gap=abs(lhs - rhs))


def diagonal_sum(f: Eigenform, tol: float = 1e-10) -> Tuple[float, float, int, int]:
    """sum_{n, r} A_f(n, r) V_{k,1}(n) V_{k,2}(n r^2) / (n r) with its tail model and cutoffs."""
    k = f.weight
    M1, tail1 = cutoff_length(k, 1, tol)
    N2, tail2 = cutoff_length(k, 2, tol)
    limit = max(M1, N2)
    sym2 = f.sym2_table(limit)
    v1 = np.concatenate([[0.0], v_weights(k, 1, np.arange(1, M1 + 1))])
    v2 = np.concatenate([[0.0], v_weights(k, 2, np.arange(1, N2 + 1))])
    terms = [
        gl3_from_table(sym2, n, r) * v1[n] * v2[n * r * r] / (n * r)
        for n, r in _pair_indices(N2)
        if n <= M1
    ]
    return math.fsum(terms), tail1 + tail2, M1, N2


def main_term_sum(f: Eigenform, tol: float = 1e-10) -> MainTermResult:
    """Diagonal sum against (6/pi^2) L(1, sym^2 f)^2.

    The gap is O(k^{-1/2}) with a constant built from L(1/2 + it, sym^2 f), so at
    small weights it varies with f and only the relative gap trends down in k.
    """
    total, tail, _, _ = diagonal_sum(f, tol)
    edge = sym2_value(f, 1.0).value
    target = 6.0 / math.pi ** 2 * edge * edge
    return MainTermResult(
        k=f.weight, label=f.label, sum=total, target=target, gap=abs(total - target),
        rel_gap=abs(total - target) / target, tail_bound=tail,
    )
