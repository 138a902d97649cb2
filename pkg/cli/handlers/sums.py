import logging
from argparse import Namespace
from typing import Any, Dict, List

from core.run_logging import RunDiagnostics, timed_operation
from schemas.sums import ExpSumScanRow, KloostermanParams, PoissonComparison
from services.arith_sums import kloosterman, run_poisson_cases, scan_s1, scan_s2, scan_s3, weil_bound

from ..router import CommandRouter, arg


logger = logging.getLogger(__name__)

sums_router = CommandRouter()


@sums_router.command(
    "kloosterman",
    summary="Kloosterman sum S(n, m; c) with its Weil bound",
    arguments=[
        arg("--n", type=int, required=True),
        arg("--m", type=int, required=True),
        arg("--c", type=int, required=True),
    ],
)
def kloosterman_sum(args: Namespace, diagnostics: RunDiagnostics) -> Dict[str, Any]:
    params = KloostermanParams(n=args.n, m=args.m, c=args.c)
    value = kloosterman(params.n, params.m, params.c)
    bound = weil_bound(params.n, params.m, params.c)
    return {"n": params.n, "m": params.m, "c": params.c, "value": value, "weil_bound": bound, "weil_ok": abs(value) <= bound + 1e-9}


@sums_router.command(
    "expsum-scan",
    summary="Exhaustive scans of the complete exponential sums S1, S2, S3",
    arguments=[
        arg("--kind", choices=["s1", "s2", "s3"], required=True),
        arg("--max-modulus", type=int, default=60, help="c2' for S1, c1' for S2, largest prime for S3"),
    ],
)
def expsum_scan(args: Namespace, diagnostics: RunDiagnostics) -> List[ExpSumScanRow]:
    """
    Scan one family of exponential sums against its closed form or bound.

    Args:
        args: parsed flags (kind, max_modulus)
        diagnostics: run diagnostics to fill

    Returns:
        One row per evaluated parameter tuple
    """
    scans = {"s1": scan_s1, "s2": scan_s2, "s3": scan_s3}
    with timed_operation(f"scan_{args.kind}", diagnostics):
        rows = scans[args.kind](args.max_modulus)
    failures = sum(1 for row in rows if not row.passes_bound)
    diagnostics.update({"rows": len(rows), "failures": failures})
    if failures:
        logger.warning(f"{failures} of {len(rows)} {args.kind} rows violate their prediction")
    return rows


@sums_router.command(
    "poisson-check",
    summary="Smooth periodic sums against the zero-frequency Poisson term",
    arguments=[arg("--case", choices=["all", "constant", "character", "kloosterman"], default="all")],
)
def poisson_check(args: Namespace, diagnostics: RunDiagnostics) -> List[PoissonComparison]:
    with timed_operation("poisson", diagnostics):
        results = run_poisson_cases(args.case)
    diagnostics.record("max_error", max(r.error for r in results))
    return results
