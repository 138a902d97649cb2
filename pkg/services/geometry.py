"""Integrals over the SL2(Z) fundamental domain.

The domain {|x| <= 1/2, |z| >= 1} is cut into a curved strip below y = 1 and
rectangles above it. Every panel carries a tensor-product Gauss-Legendre rule
with the measure dx dy / y^2 folded into the weights. Rectangles are appended
in the cusp until the integrand is negligible.
"""

import logging
import math
import threading
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from core.config import settings
from core.errors import BudgetError, ConvergenceError, InputValidationError, InvariantViolationError
from schemas.geometry import NormReport, QuadratureDiagnostics, SpectralResult, WatsonResult
from services.hecke_core import Eigenform
from services.lfun import central_value_g, central_value_sym2xg, sym2_value
from services.special_fn import log_gamma


logger = logging.getLogger(__name__)

VOLUME = math.pi / 3.0
Y_MIN = math.sqrt(3.0) / 2.0
CUSP_STEP = 4.0
CUSP_LIMIT = 400.0
SERIES_CUTOFF = 1e-17

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DomainGrid:
    """Panel layout of the truncated fundamental domain."""

    y_max: float = 8.0
    order: int = 24
    x_panels: int = 4
    y_step: float = 1.0

    @classmethod
    def from_settings(cls) -> "DomainGrid":
        return cls(y_max=settings.grid_y_max, order=settings.grid_order)

    def refined(self) -> "DomainGrid":
        return replace(self, x_panels=2 * self.x_panels, y_step=self.y_step / 2.0)

    @cached_property
    def _rule(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.polynomial.legendre.leggauss(self.order)

    def _x_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        t, w = self._rule
        edges = np.linspace(-0.5, 0.5, self.x_panels + 1)
        half = (edges[1:] - edges[:-1]) / 2.0
        mid = (edges[1:] + edges[:-1]) / 2.0
        return (mid[:, None] + half[:, None] * t).ravel(), (half[:, None] * w).ravel()

    def band(self, y_low: float, y_high: float) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes z and weights (with 1/y^2) on the rectangle |x| <= 1/2, y_low <= y <= y_high."""
        t, w = self._rule
        xs, wx = self._x_nodes()
        count = max(1, int(math.ceil((y_high - y_low) / self.y_step - 1e-12)))
        edges = np.linspace(y_low, y_high, count + 1)
        half = (edges[1:] - edges[:-1]) / 2.0
        mid = (edges[1:] + edges[:-1]) / 2.0
        ys = (mid[:, None] + half[:, None] * t).ravel()
        wy = (half[:, None] * w).ravel()
        z = xs[:, None] + 1j * ys[None, :]
        weights = wx[:, None] * wy[None, :] / ys[None, :] ** 2
        return z.ravel(), weights.ravel()

    @cached_property
    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        t, w = self._rule
        xs, wx = self._x_nodes()

        # curved strip sqrt(1 - x^2) <= y <= 1
        floor = np.sqrt(1.0 - xs * xs)
        half = (1.0 - floor) / 2.0
        ys = (floor + 1.0)[:, None] / 2.0 + half[:, None] * t[None, :]
        curved_z = (xs[:, None] + 1j * ys).ravel()
        curved_w = (wx[:, None] * half[:, None] * w[None, :] / ys ** 2).ravel()

        rect_z, rect_w = self.band(1.0, self.y_max)
        return np.concatenate([curved_z, rect_z]), np.concatenate([curved_w, rect_w])

    @property
    def size(self) -> int:
        return len(self.nodes[0])

    def volume(self) -> float:
        """Grid integral of 1 plus the analytic cusp tail 1/y_max."""
        return math.fsum(self.nodes[1]) + 1.0 / self.y_max


def check_volume(grid: DomainGrid, tol: float = 1e-8) -> float:
    volume = grid.volume()
    if abs(volume - VOLUME) > tol:
        raise ConvergenceError(f"Grid volume {volume!r} differs from pi/3 by more than {tol}")
    return volume


def _integrate_once(grid: DomainGrid, integrand: Integrand) -> Tuple[complex, float, float, float]:
    """(integral, L1 mass of the integrand, cusp height reached, last band contribution)."""
    z, w = grid.nodes
    values = integrand(z)
    total = complex(np.sum(values * w))
    mass = float(np.sum(np.abs(values) * w))
    y_top = grid.y_max
    last = abs(total)
    while True:
        band_z, band_w = grid.band(y_top, y_top + CUSP_STEP)
        values = integrand(band_z)
        piece = complex(np.sum(values * band_w))
        total += piece
        mass += float(np.sum(np.abs(values) * band_w))
        y_top += CUSP_STEP
        last = abs(piece)
        if last <= 1e-16 * max(mass, 1e-300):
            return total, mass, y_top, last
        if y_top > CUSP_LIMIT:
            raise ConvergenceError(f"Integrand still significant at y = {y_top}")


def integrate(integrand: Integrand, grid: Optional[DomainGrid] = None, rel_tol: Optional[float] = None) -> Tuple[complex, QuadratureDiagnostics]:
    """Integral over the domain, refining the panels until the change is below ``rel_tol``.

    The change is measured against the L1 mass of the integrand, so integrals that
    cancel to zero converge too.
    """
    grid = grid or DomainGrid.from_settings()
    rel_tol = rel_tol if rel_tol is not None else settings.grid_rel_tol
    check_volume(grid)

    value, _, y_top, tail = _integrate_once(grid, integrand)
    levels = 1
    change = math.inf
    while levels <= settings.grid_max_refinements:
        grid = grid.refined()
        refined, mass, y_top, tail = _integrate_once(grid, integrand)
        levels += 1
        change = abs(refined - value) / max(mass, 1e-300)
        value = refined
        if change <= rel_tol:
            break
    else:
        raise ConvergenceError(f"Quadrature change {change:.3g} above {rel_tol} after {levels} levels")

    diagnostics = QuadratureDiagnostics(
        y_max=y_top, order=grid.order, levels=levels, nodes=grid.size, rel_change=change, cusp_tail=tail,
    )
    return value, diagnostics


# Forms on the domain

def series_length(k: int, y_min: float = Y_MIN) -> Tuple[int, float]:
    """Terms N of y^{k/2} sum lambda(n) e(nz) needed at Im z >= y_min, and the tail bound beyond N.

    Uses |lambda(n)| <= 2 sqrt(n) n^{(k-1)/2}; past n = k/(4 pi y_min) the bound decreases in y too.
    """
    def log_term(n: int) -> float:
        return math.log(2.0) + 0.5 * k * math.log(n) + 0.5 * k * math.log(y_min) - 2.0 * math.pi * n * y_min

    peak = k / (4.0 * math.pi * y_min)
    n = 1
    while n <= peak or log_term(n) > math.log(SERIES_CUTOFF):
        n += 1
    ratio = math.exp(log_term(n + 1) - log_term(n))
    tail = math.exp(log_term(n + 1)) / (1.0 - ratio)
    return n, tail


@dataclass(frozen=True)
class NormalizedForm:
    """F(z) = scale * y^{k/2} f(z) for a Hecke-normalized eigenform f."""

    base: Eigenform
    scale: float = 1.0

    @property
    def k(self) -> int:
        return self.base.weight

    @cached_property
    def _series(self) -> Tuple[np.ndarray, np.ndarray, float]:
        N, tail = series_length(self.k)
        n = np.arange(1, N + 1, dtype=float)
        a = np.array([self.base.coefficient(int(i)) for i in n])
        return n, a, tail

    @property
    def tail_bound(self) -> float:
        return self.scale * self._series[2]

    def __call__(self, z: np.ndarray) -> np.ndarray:
        n, a, _ = self._series
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.empty(len(flat), dtype=complex)
        half = (self.k - 1) / 2.0
        for start in range(0, len(flat), 4096):
            chunk = flat[start : start + 4096]
            x, y = chunk.real[:, None], chunk.imag[:, None]
            log_size = half * np.log(n)[None, :] + 0.5 * self.k * np.log(y) - 2.0 * math.pi * n[None, :] * y
            terms = a[None, :] * np.exp(log_size) * np.exp(2j * math.pi * n[None, :] * x)
            out[start : start + 4096] = terms.sum(axis=1)
        return (self.scale * out).reshape(z.shape)


def eval_F(nf: NormalizedForm, z: complex) -> complex:
    if z.imag < Y_MIN - 1e-12:
        raise InputValidationError(f"Evaluation point must have Im z >= sqrt(3)/2, got {z}")
    if nf.tail_bound > 1e-12:
        raise BudgetError(f"q-series tail {nf.tail_bound:.3g} exceeds 1e-12")
    return complex(nf(np.array([z]))[0])


_normalized: Dict[Tuple[int, int, int, DomainGrid], Tuple[NormalizedForm, QuadratureDiagnostics]] = {}
_normalized_lock = threading.RLock()


def l2_normalize(f: Eigenform, grid: Optional[DomainGrid] = None) -> NormalizedForm:
    """Scale f so that the L2 norm of F over the domain is 1."""
    grid = grid or DomainGrid.from_settings()
    key = (f.weight, f.label, f.budget, grid)
    with _normalized_lock:
        if key not in _normalized:
            raw = NormalizedForm(base=f)
            value, diagnostics = integrate(lambda z: np.abs(raw(z)) ** 2, grid)
            norm_squared = value.real
            if norm_squared <= 0:
                raise ConvergenceError(f"Non-positive L2 integral for weight {f.weight} form {f.label}")
            logger.debug(f"<f,f> = {norm_squared:.12g} for weight {f.weight} form {f.label}")
            _normalized[key] = (NormalizedForm(base=f, scale=1.0 / math.sqrt(norm_squared)), diagnostics)
        return _normalized[key][0]


def lp_norm(nf: NormalizedForm, p: int, grid: Optional[DomainGrid] = None) -> Tuple[float, float, QuadratureDiagnostics]:
    """(||F||_p, ||F||_p^p, diagnostics) for p in {2, 4}."""
    if p not in (2, 4):
        raise InputValidationError(f"p must be 2 or 4, got {p}")
    value, diagnostics = integrate(lambda z: np.abs(nf(z)) ** p, grid)
    power = value.real
    return power ** (1.0 / p), power, diagnostics


def norm_report(f: Eigenform, grid: Optional[DomainGrid] = None) -> NormReport:
    nf = l2_normalize(f, grid)
    l2, _, _ = lp_norm(nf, 2, grid)
    l4, l4_fourth, diagnostics = lp_norm(nf, 4, grid)
    ratio = VOLUME * l4_fourth
    if ratio < 1.0 - 1e-6:
        raise InvariantViolationError(f"(pi/3)||F||_4^4 = {ratio} is below 1")
    return NormReport(
        k=f.weight, label=f.label, scale=nf.scale, l2=l2, l4=l4, l4_fourth=l4_fourth,
        conjecture_ratio=ratio, diagnostics=diagnostics,
    )


def inner_product(nf: NormalizedForm, ng: NormalizedForm, grid: Optional[DomainGrid] = None) -> complex:
    if nf.k != ng.k:
        raise InputValidationError(f"Inner product needs equal weights, got {nf.k} and {ng.k}")
    value, _ = integrate(lambda z: nf(z) * np.conj(ng(z)), grid)
    return value


def triple_inner(nf: NormalizedForm, ng: NormalizedForm, grid: Optional[DomainGrid] = None) -> complex:
    """<F^2, G> for F of weight k and G of weight 2k."""
    if ng.k != 2 * nf.k:
        raise InputValidationError(f"Triple product needs weights (k, 2k), got ({nf.k}, {ng.k})")
    value, _ = integrate(lambda z: nf(z) ** 2 * np.conj(ng(z)), grid)
    return value


def petersson_norm_oracle(f: Eigenform) -> float:
    """<f, f> = Gamma(k) L(1, sym^2 f) / (2 pi^2 (4 pi)^{k-1})."""
    k = f.weight
    edge = sym2_value(f, 1.0).value
    log_norm = log_gamma(k).real - math.log(2.0 * math.pi ** 2) - (k - 1) * math.log(4.0 * math.pi)
    return edge * math.exp(log_norm)


def watson_rhs(k: int, central_g: float, central_sym2xg: float, edge_f: float, edge_g: float) -> float:
    return math.pi ** 3 / (2.0 * (2 * k - 1)) * central_g * central_sym2xg / (edge_f * edge_f * edge_g)


def watson_check(f: Eigenform, g: Eigenform, grid: Optional[DomainGrid] = None, tol: float = 1e-8) -> WatsonResult:
    """|<F^2, G>|^2 by quadrature against its central-value expression."""
    k = f.weight
    lhs = abs(triple_inner(l2_normalize(f, grid), l2_normalize(g, grid), grid)) ** 2

    central_g = central_value_g(g, k, tol).value
    central_sym2xg = central_value_sym2xg(f, g, tol).value
    edge_f = sym2_value(f, 1.0).value
    edge_g = sym2_value(g, 1.0).value
    rhs = watson_rhs(k, central_g, central_sym2xg, edge_f, edge_g)
    if rhs < -1e-10:
        raise InvariantViolationError(
            f"Negative Watson value {rhs:.3g} for weight {k} forms ({f.label}, {g.label})"
        )
    rel_gap = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-30)
    return WatsonResult(
        k=k, f_label=f.label, g_label=g.label, lhs=lhs, rhs=rhs, rel_gap=rel_gap,
        central_g=central_g, central_sym2xg=central_sym2xg, edge_f=edge_f, edge_g=edge_g,
    )


def spectral_check(f: Eigenform, partners: List[Eigenform], grid: Optional[DomainGrid] = None) -> SpectralResult:
    """||F||_4^4 against the sum of |<F^2, G>|^2 over the weight-2k eigenbasis."""
    nf = l2_normalize(f, grid)
    _, l4_fourth, _ = lp_norm(nf, 4, grid)
    products = [abs(triple_inner(nf, l2_normalize(g, grid), grid)) ** 2 for g in partners]
    spectral_sum = math.fsum(products)
    return SpectralResult(
        k=f.weight, label=f.label, l4_fourth=l4_fourth, spectral_sum=spectral_sum,
        rel_gap=abs(l4_fourth - spectral_sum) / max(l4_fourth, 1e-30), triple_products=products,
    )
