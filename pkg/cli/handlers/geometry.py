import logging
from argparse import Namespace

from core.run_logging import RunDiagnostics, timed_operation
from schemas.geometry import NormReport, WatsonResult
from services.form_library import form_library
from services.geometry import norm_report, watson_check

from ..router import CommandRouter, arg


logger = logging.getLogger(__name__)

geometry_router = CommandRouter()


@geometry_router.command(
    "l4",
    summary="L2-normalize F = y^{k/2} f over the fundamental domain and compute its L4 norm",
    arguments=[
        arg("--weight", type=int, required=True),
        arg("--form-index", type=int, default=0),
    ],
)
def l4(args: Namespace, diagnostics: RunDiagnostics) -> NormReport:
    f = form_library.eigenform(args.weight, args.form_index)
    with timed_operation("l4_norm", diagnostics):
        report = norm_report(f)
    diagnostics.update({"quadrature_levels": report.diagnostics.levels, "y_max": report.diagnostics.y_max})
    return report


@geometry_router.command(
    "watson",
    summary="Triple product <F^2, G> by quadrature against central L-values",
    arguments=[
        arg("--weight", type=int, required=True),
        arg("--form-index", type=int, default=0),
        arg("--g-index", type=int, required=True),
    ],
)
def watson(args: Namespace, diagnostics: RunDiagnostics) -> WatsonResult:
    f = form_library.eigenform(args.weight, args.form_index)
    g = form_library.eigenform(2 * args.weight, args.g_index)
    with timed_operation("watson", diagnostics):
        result = watson_check(f, g, tol=args.tol)
    if result.rel_gap > 1e-3:
        logger.warning(f"Watson gap {result.rel_gap:.3g} for weight {args.weight} forms ({f.label}, {g.label})")
    return result
