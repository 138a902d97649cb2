import logging
from argparse import Namespace

from core.run_logging import RunDiagnostics, timed_operation
from schemas.bessel import WeightPreset
from schemas.trace import AverageExperiment, MaindoneResult, PeterssonResult, TraceCheckConfig
from services.form_library import form_library
from services.trace import maindone_check, petersson_check, theorem_average

from ..router import CommandRouter, arg


logger = logging.getLogger(__name__)

trace_router = CommandRouter()


@trace_router.command(
    "trace-check",
    summary="Petersson trace formula: spectral side against the Kloosterman side",
    arguments=[
        arg("--weight", type=int, required=True),
        arg("--n", type=int, default=1),
        arg("--m", type=int, default=1),
        arg("--c-max", type=int, default=None),
    ],
)
def trace_check(args: Namespace, diagnostics: RunDiagnostics) -> PeterssonResult:
    cfg = TraceCheckConfig(k=args.weight, n=args.n, m=args.m, c_max=args.c_max, tol=args.tol)
    with timed_operation("petersson", diagnostics):
        result = petersson_check(cfg)
    diagnostics.update({"c_max": result.c_max, "tail_bound": result.tail_bound})
    return result


@trace_router.command(
    "maindone-check",
    summary="Fourth moment against 6/pi plus the off-diagonal Kloosterman term",
    arguments=[
        arg("--weight", type=int, required=True),
        arg("--form-index", type=int, default=0),
    ],
)
def maindone(args: Namespace, diagnostics: RunDiagnostics) -> MaindoneResult:
    f = form_library.eigenform(args.weight, args.form_index)
    with timed_operation("maindone", diagnostics):
        result = maindone_check(f, tol=args.tol)
    diagnostics.record("tail_bound", result.tail_bound)
    return result


@trace_router.command(
    "theorem-avg",
    summary="Weighted average of fourth moments over weights k in (K, 2K)",
    arguments=[
        arg("--K", type=int, required=True, dest="K"),
        arg("--h", choices=[p.value for p in WeightPreset], default=WeightPreset.BUMP.value),
        arg("--quadrature-check", action="store_true"),
    ],
)
def theorem_avg(args: Namespace, diagnostics: RunDiagnostics) -> AverageExperiment:
    experiment = AverageExperiment(K=args.K, weight_function=args.h, quadrature_check=args.quadrature_check)
    with timed_operation("theorem_average", diagnostics):
        result = theorem_average(experiment, threads=args.threads)
    diagnostics.record("forms", len(result.per_form))
    logger.info(f"Average {result.average:.8g} against target {result.target:.8g}")
    return result
