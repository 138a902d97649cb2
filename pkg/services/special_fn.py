"""Log-gamma, integer-order Bessel functions and the Bessel-average experiments."""

import logging
import math
from fractions import Fraction
from typing import Iterable, List

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.special import jv

from core.config import settings
from core.errors import InputValidationError, PoleError, RegimeMismatchError
from schemas.bessel import BesselAvgConfig, BesselRegime, BoundCheck, PairAvgResult, WeightPreset


logger = logging.getLogger(__name__)


# Weights on (1, 2)

def bump_weight(u):
    """exp(4 - 1/(u-1) - 1/(2-u)) on (1, 2), zero elsewhere; peak value 1 at u = 3/2."""
    scalar = np.isscalar(u)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    inside = (u > 1.0) & (u < 2.0)
    ui = u[inside]
    out[inside] = np.exp(4.0 - 1.0 / (ui - 1.0) - 1.0 / (2.0 - ui))
    return float(out[0]) if scalar else out


WEIGHTS = {WeightPreset.BUMP: bump_weight}


def weight_function(preset: WeightPreset):
    return WEIGHTS[WeightPreset(preset)]


def weight_integral(preset: WeightPreset = WeightPreset.BUMP) -> float:
    h = weight_function(preset)
    value, _ = quad(h, 1.0, 2.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    return value


def i_power(k: int) -> int:
    """i^k for even k, which is also i^{-k}."""
    if k % 2:
        raise InputValidationError(f"i^k is only real for even k, got {k}")
    return -1 if (k // 2) % 2 else 1


# Log-gamma

def log_gamma(s) -> complex:
    """Principal branch of log Gamma(s); mpmath reflects for Re s < 1/2."""
    if isinstance(s, Fraction):
        s = mp.mpf(s.numerator) / s.denominator
    return complex(log_gamma_mp(mp.mpmathify(s)))


def log_gamma_mp(s) -> mp.mpc:
    if mp.im(s) == 0 and mp.re(s) <= 0 and mp.re(s) == mp.floor(mp.re(s)):
        raise PoleError(f"Gamma has a pole at s={s}")
    return mp.loggamma(s)


# Bessel functions

def bessel_regime(ell: int, x: float) -> BesselRegime:
    if x <= math.sqrt(ell):
        return BesselRegime.SERIES
    if x >= ell * (1.0 + ell ** (-1.0 / 3.0)):
        return BesselRegime.LANGER
    return BesselRegime.QUADRATURE


def _bessel_series(ell: int, x: float) -> float:
    with mp.workdps(30):
        half = mp.mpf(x) / 2
        term = half ** ell / mp.factorial(ell)
        total = term
        m = 0
        while abs(term) > mp.mpf("1e-32") * max(abs(total), mp.mpf("1e-300")):
            m += 1
            term *= -(half * half) / (m * (m + ell))
            total += term
        return float(total)


def _bessel_quadrature(ell: int, x: float) -> float:
    """Trapezoid rule over a full period of cos(ell t - x sin t)."""
    points = max(64, int(settings.bessel_points_per_oscillation * (ell + x)) + 1)
    theta = np.arange(points) * (2.0 * np.pi / points)
    return float(np.cos(ell * theta - x * np.sin(theta)).mean())


def _bessel_langer(ell: int, x: float) -> float:
    if x <= ell:
        raise RegimeMismatchError(f"Langer's formula needs x > ell, got x={x}, ell={ell}")
    w = math.sqrt((x / ell) ** 2 - 1.0)
    phase = ell * (w - math.atan(w)) - math.pi / 4.0
    amplitude = math.sqrt(2.0 / (math.pi * ell * w))
    correction = (3.0 / w + 5.0 / w ** 3) / (24.0 * ell)
    return amplitude * (math.cos(phase) + math.sin(phase) * correction)


def bessel_j(ell: int, x: float, regime: BesselRegime = BesselRegime.AUTO) -> float:
    """J_ell(x) with regime dispatch; ``precise`` never takes the asymptotic branch."""
    if ell < 1:
        raise InputValidationError(f"Bessel order must be >= 1, got {ell}")
    if x < 0:
        raise InputValidationError(f"Bessel argument must be >= 0, got {x}")
    if x == 0:
        return 0.0

    regime = BesselRegime(regime)
    if regime == BesselRegime.AUTO:
        regime = bessel_regime(ell, x)
    elif regime == BesselRegime.PRECISE:
        regime = BesselRegime.SERIES if x <= math.sqrt(ell) else BesselRegime.QUADRATURE

    if regime == BesselRegime.SERIES:
        return _bessel_series(ell, x)
    if regime == BesselRegime.QUADRATURE:
        return _bessel_quadrature(ell, x)
    return _bessel_langer(ell, x)


def bessel_j_array(orders, x) -> np.ndarray:
    """Vectorized J for bulk sums (broadcasts orders against arguments)."""
    return jv(np.asarray(orders, dtype=float), np.asarray(x, dtype=float))


# Averages over the weight k

def window_weights(K: float, parity: int) -> np.ndarray:
    """Weights k with k/K in (1, 2) and k divisible by ``parity``."""
    start = parity * (math.floor(K / parity) + 1)
    ks = np.arange(start, int(math.ceil(2 * K)) + 1, parity)
    return ks[(ks > K) & (ks < 2 * K)]


def bessel_avg_single(cfg: BesselAvgConfig, y: float) -> float:
    """4 sum over k = 0 mod 4 of h(k/K) J_{k-1}(y)."""
    if y <= 0:
        raise InputValidationError(f"y must be positive, got {y}")
    ks = window_weights(cfg.K, 4)
    h = weight_function(cfg.h)(ks / cfg.K)
    return 4.0 * math.fsum(h * bessel_j_array(ks - 1, y))


def single_average_residual(cfg: BesselAvgConfig, y: float) -> float:
    return bessel_avg_single(cfg, y) - weight_function(cfg.h)(y / cfg.K)


def _pair_sum(K: float, preset: WeightPreset, x_arg: float, y_arg: float) -> float:
    ks = window_weights(K, 2)
    signs = np.array([i_power(int(k)) for k in ks])
    h = weight_function(preset)(ks / K)
    terms = signs * h * bessel_j_array(ks - 1, x_arg) * bessel_j_array(2 * ks - 1, y_arg)
    return math.fsum(terms)


def in_support_window(K: float, x: float, y: float) -> bool:
    ratio = y / (4.0 * x)
    if ratio >= 1.0:
        return False
    gap = 1.0 - ratio
    scale = K * K / (y * y)
    return settings.window_c1 * scale <= gap <= settings.window_c2 * scale


def bessel_avg_pair(cfg: BesselAvgConfig, x: float, y: float) -> PairAvgResult:
    """Sum over even k of i^k h(k/K) J_{k-1}(4 pi x) J_{2k-1}(4 pi y)."""
    if x <= 0 or y <= 0:
        raise InputValidationError(f"x and y must be positive, got ({x}, {y})")
    value = _pair_sum(cfg.K, cfg.h, 4.0 * math.pi * x, 4.0 * math.pi * y)
    phase = y * y / (4.0 * x) + 2.0 * x
    removed = value * complex(math.cos(2 * math.pi * phase), -math.sin(2 * math.pi * phase)) * math.sqrt(x)
    return PairAvgResult(
        K=cfg.K, x=x, y=y,
        value_re=value, value_im=0.0,
        phase_removed_re=removed.real, phase_removed_im=removed.imag,
        support_flag=in_support_window(cfg.K, x, y),
    )


def classify_pair(K: float, x: float, y: float, eps: float = 0.1) -> List[str]:
    """Names of the lemmas whose hypotheses (x, y) satisfies."""
    lower, upper = K ** (4.0 / 3.0 - eps), K ** (2.0 - eps)
    if x > upper:
        return ["bigx"] if y < K ** (2.0 + eps) else []
    if x <= lower or y < x * K ** -eps or y > x * K ** eps:
        return ["doubleavg"]
    names = ["doublebound1"]
    if abs(1.0 - y / (4.0 * x)) > K ** (2.0 + eps) / (x * x):
        names.append("doublebound2")
    return names


def pair_bound_checks(cfg: BesselAvgConfig, x: float, y: float, eps: float = 0.1) -> List[BoundCheck]:
    """Evaluate the direct average and compare it with every bound that applies."""
    names = classify_pair(cfg.K, x, y, eps)
    if not names:
        raise RegimeMismatchError(f"(x, y) = ({x}, {y}) fits no lemma at K={cfg.K}")

    K = cfg.K
    checks = []
    if names == ["bigx"]:
        value = _pair_sum(K, cfg.h, x, y)
        bound = K ** (-5.0 / 6.0)
        checks.append(BoundCheck(
            K=K, x=x, y=y, re=value, im=0.0, abs_phase_removed=abs(value) * math.sqrt(x),
            support_flag=False, bound_name="bigx", bound_value=bound, passed=abs(value) <= bound,
        ))
        return checks

    pair = bessel_avg_pair(cfg, x, y)
    value = abs(pair.value)
    removed = abs(pair.phase_removed)
    for name in names:
        if name == "doublebound1":
            bound = K / math.sqrt(x * y)
            passed = value <= bound
        elif name == "doublebound2":
            bound = (x / K) * (x * x / (K * K * abs(4 * x - y)))
            passed = value <= bound
        elif pair.support_flag:
            name, bound = "doubleavg_amplitude", 1.0
            passed = removed <= bound
        else:
            name, bound = "doubleavg_outside", 1e-6
            passed = value <= bound
        checks.append(BoundCheck(
            K=K, x=x, y=y, re=pair.value_re, im=pair.value_im, abs_phase_removed=removed,
            support_flag=pair.support_flag, bound_name=name, bound_value=bound, passed=passed,
        ))
    for check in checks:
        if not check.passed:
            logger.info(f"Bound {check.bound_name} not met at K={K}, x={x:.4g}, y={y:.4g}")
    return checks


def window_y(K: float, x: float, position: float = 1.0) -> float:
    """y < 4x with 1 - y/4x = position * K^2 / y^2, by fixed-point iteration."""
    y = 4.0 * x
    for _ in range(200):
        y_next = 4.0 * x * (1.0 - position * K * K / (y * y))
        if abs(y_next - y) < 1e-12 * y:
            return y_next
        y = y_next
    return y


def breakdown_scan(K: float, exponents: Iterable[float], preset: WeightPreset = WeightPreset.BUMP) -> List[dict]:
    """Pair averages along the support window for x = K^e, against the size sqrt(x)/K."""
    rows = []
    cfg = BesselAvgConfig(K=K, h=preset)
    for e in exponents:
        x = K ** e
        y = window_y(K, x)
        pair = bessel_avg_pair(cfg, x, y)
        predicted = math.sqrt(x) / K
        rows.append({
            "K": K, "exponent": e, "x": x, "y": y,
            "abs_value": abs(pair.value),
            "main_term_size": predicted,
            "jbound_size": K / x,
            "ratio": abs(pair.value) / predicted,
        })
    return rows


def bigx_profile(K: float, x: float, preset: WeightPreset = WeightPreset.BUMP) -> List[dict]:
    """J_{k-1}(x) against its large-argument reconstruction through z(u), for k in the window."""
    rows = []
    for k in window_weights(K, 2):
        k = int(k)
        nu = k - 1
        v = nu / x
        if v >= 1:
            raise RegimeMismatchError(f"Reconstruction needs x > k - 1, got x={x}, k={k}")
        root = math.sqrt(1.0 - v * v)
        z = x * root + nu * math.atan(v / root)
        shifted = z - nu * math.pi / 2.0
        approx = i_power(k) * (math.cos(z) - math.sin(z)) / math.sqrt(math.pi * shifted)
        exact = float(bessel_j_array(nu, x))
        rows.append({
            "k": k,
            "weight": float(weight_function(preset)(k / K)),
            "exact": exact,
            "approx": approx,
            "deviation": abs(exact - approx),
        })
    return rows
