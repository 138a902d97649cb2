"""Petersson trace formula, the fourth-moment identity and the weighted average over weights."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from core.errors import InvariantViolationError
from core.workers import map_ordered
from schemas.trace import (
    AverageExperiment,
    FormL4Record,
    MaindoneResult,
    PeterssonResult,
    TraceCheckConfig,
)
from services.arith_sums import kloosterman, kloosterman_matrix
from services.form_library import form_library
from services.geometry import VOLUME, DomainGrid, l2_normalize, lp_norm, watson_rhs
from services.hecke_core import Eigenform, gl3_from_table
from services.lfun import central_value_g, central_value_sym2xg, cutoff_length, diagonal_sum, sym2_value, v_weights
from services.special_fn import bessel_j_array, i_power, weight_function, weight_integral


logger = logging.getLogger(__name__)

SIX_OVER_PI = 6.0 / math.pi
QUADRATURE_WEIGHT_LIMIT = 22


def kloosterman_tail(ell: int, argument: float, C: int) -> float:
    """Bound for sum_{c > C} |S| c^{-1} |J_ell(4 pi A / c)| with |S| <= c and J_ell(x) <= (x/2)^ell / ell!.

    ``argument`` is 2 pi A, the numerator of x/2.
    """
    log_size = ell * math.log(argument) - math.lgamma(ell + 1) + (1 - ell) * math.log(C) - math.log(ell - 1)
    return math.exp(log_size)


def kloosterman_length(ell: int, argument: float, budget: float) -> Tuple[int, float]:
    """Smallest C with kloosterman_tail(ell, argument, C) <= budget."""
    log_bound = ell * math.log(argument) - math.lgamma(ell + 1) - math.log(ell - 1)
    C = max(1, math.ceil(math.exp((log_bound - math.log(budget)) / (ell - 1))))
    while kloosterman_tail(ell, argument, C) > budget:
        C += 1
    return C, kloosterman_tail(ell, argument, C)


def petersson_check(cfg: TraceCheckConfig, forms: Optional[List[Eigenform]] = None) -> PeterssonResult:
    """Spectral side sum_f omega_f a_f(n) a_f(m) against the Kloosterman side."""
    k, n, m = cfg.k, cfg.n, cfg.m
    forms = form_library.eigenforms(k) if forms is None else forms
    lhs = 2.0 * math.pi ** 2 / (k - 1) * math.fsum(
        f.coefficient(n) * f.coefficient(m) / sym2_value(f, 1.0).value for f in forms
    )

    ell = k - 1
    argument = 2.0 * math.pi * math.sqrt(n * m)
    scaled_budget = cfg.tol / 10.0 / (2.0 * math.pi)
    if cfg.c_max is None:
        c_max, tail = kloosterman_length(ell, argument, scaled_budget)
    else:
        c_max, tail = cfg.c_max, kloosterman_tail(ell, argument, cfg.c_max)
        if tail > scaled_budget:
            raise InvariantViolationError(f"Kloosterman tail {tail:.3g} at c_max={c_max} exceeds tol/10")

    cs = np.arange(1, c_max + 1)
    sums = np.array([kloosterman(n, m, int(c)) for c in cs])
    bessel = bessel_j_array(ell, 4.0 * math.pi * math.sqrt(n * m) / cs)
    rhs = float(n == m) + 2.0 * math.pi * i_power(k) * math.fsum(sums / cs * bessel)
    return PeterssonResult(
        k=k, n=n, m=m, c_max=c_max, lhs=lhs, rhs=rhs, gap=abs(lhs - rhs), tail_bound=2.0 * math.pi * tail,
    )


def _offdiagonal(f: Eigenform, tol: float) -> Tuple[float, float]:
    """sum over m, n, r, c of A(n, r) V1(m) V2(n r^2) (m n r^2)^{-1/2} S(n, m; c) c^{-1} J_{2k-1}(4 pi sqrt(nm)/c)."""
    k = f.weight
    M1, _ = cutoff_length(k, 1, tol)
    N2, _ = cutoff_length(k, 2, tol)
    sym2 = f.sym2_table(N2)
    v2 = np.concatenate([[0.0], v_weights(k, 2, np.arange(1, N2 + 1))])

    ns = np.arange(1, N2 + 1)
    ms = np.arange(1, M1 + 1)
    row_weights = np.zeros(N2)
    for n in ns:
        row_weights[n - 1] = math.fsum(
            gl3_from_table(sym2, int(n), r) * v2[n * r * r] / (math.sqrt(n) * r)
            for r in range(1, math.isqrt(N2 // n) + 1)
        )
    column_weights = v_weights(k, 1, ms) / np.sqrt(ms)

    ell = 2 * k - 1
    argument = 2.0 * math.pi * math.sqrt(N2 * M1)
    mass = float(np.abs(row_weights).sum() * np.abs(column_weights).sum())
    C, tail = kloosterman_length(ell, argument, tol / max(mass, 1e-300))

    root = np.sqrt(np.outer(ns, ms).astype(float))
    pieces = []
    for c in range(1, C + 1):
        S = kloosterman_matrix(ns, ms, c)
        J = bessel_j_array(ell, 4.0 * math.pi * root / c)
        pieces.append(float(row_weights @ (S * J) @ column_weights) / c)
    return math.fsum(pieces), tail * mass


def maindone_check(f: Eigenform, grid: Optional[DomainGrid] = None, tol: float = 1e-10) -> MaindoneResult:
    """||F||_4^4 by quadrature against 6/pi plus the off-diagonal Kloosterman contribution."""
    _, l4_direct, _ = lp_norm(l2_normalize(f, grid), 4, grid)
    edge = sym2_value(f, 1.0).value
    diagonal, diagonal_tail, _, _ = diagonal_sum(f, tol)
    offdiagonal, offdiagonal_tail = _offdiagonal(f, tol)

    off_term = 2.0 * math.pi ** 2 / edge ** 2 * offdiagonal
    exact = math.pi / edge ** 2 * diagonal + off_term
    main_plus_offdiag = SIX_OVER_PI + off_term
    logger.info(
        f"Weight {f.weight} form {f.label}: ||F||_4^4 = {l4_direct:.8g}, "
        f"identity {exact:.8g}, 6/pi + offdiagonal {main_plus_offdiag:.8g}"
    )
    return MaindoneResult(
        k=f.weight, label=f.label,
        l4_direct=l4_direct,
        main_plus_offdiag=main_plus_offdiag,
        gap=abs(l4_direct - main_plus_offdiag),
        diagonal=diagonal,
        offdiagonal=offdiagonal,
        exact_identity=exact,
        exact_gap=abs(l4_direct - exact) / l4_direct,
        diagonal_only_gap=abs(l4_direct - SIX_OVER_PI),
        tail_bound=(math.pi * diagonal_tail + 2.0 * math.pi ** 2 * offdiagonal_tail) / edge ** 2,
    )


def watson_fourth_moment(f: Eigenform, partners: List[Eigenform], tol: float = 1e-8) -> float:
    """||F||_4^4 as the sum over the weight-2k eigenbasis of the Watson central-value expression."""
    k = f.weight
    edge_f = sym2_value(f, 1.0).value
    terms = [
        watson_rhs(
            k,
            central_value_g(g, k, tol).value,
            central_value_sym2xg(f, g, tol).value,
            edge_f,
            sym2_value(g, 1.0).value,
        )
        for g in partners
    ]
    return math.fsum(terms)


def _form_record(job: Tuple[int, int, bool]) -> FormL4Record:
    k, label, with_quadrature = job
    f = form_library.eigenform(k, label)
    partners = form_library.eigenforms(2 * k)
    value = watson_fourth_moment(f, partners)
    quadrature = None
    if with_quadrature:
        _, quadrature, _ = lp_norm(l2_normalize(f), 4)
    return FormL4Record(k=k, label=label, l4_fourth=value, l4_fourth_quadrature=quadrature, conjecture_ratio=VOLUME * value)


def theorem_average(experiment: AverageExperiment, threads: Optional[int] = None) -> AverageExperiment:
    """(2/(K W)) sum over even k in (K, 2K) of w(k/K) (12/k) sum_f ||F||_4^4."""
    K = experiment.K
    h = weight_function(experiment.weight_function)
    W = weight_integral(experiment.weight_function)

    weights = [k for k in range(2 * (K // 2) + 2, 2 * K, 2) if k > K]
    # spaces are built serially; the per-form jobs only read them
    jobs = []
    for k in weights:
        count = len(form_library.eigenforms(k))
        if count:
            form_library.eigenforms(2 * k)
        with_quadrature = experiment.quadrature_check and k <= QUADRATURE_WEIGHT_LIMIT
        jobs.extend((k, label, with_quadrature) for label in range(count))

    records = map_ordered(_form_record, jobs, threads)

    total = math.fsum(
        float(h(r.k / K)) * 12.0 / r.k * r.l4_fourth for r in records
    )
    average = 2.0 / (K * W) * total
    logger.info(f"Average over K={K}: {average:.8g} (6/pi = {SIX_OVER_PI:.8g})")
    return experiment.model_copy(update={"W": W, "per_form": records, "average": average})
