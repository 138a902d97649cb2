import logging
from argparse import Namespace

from core.run_logging import RunDiagnostics, timed_operation
from schemas.lvalues import LValue
from services.form_library import form_library
from services.lfun import (
    central_value_g,
    central_value_sym2xg,
    edge_budget,
    edge_sym2,
    edge_sym2_inverse,
    sym2_value,
)

from ..router import CommandRouter, arg


logger = logging.getLogger(__name__)

lvalues_router = CommandRouter()

KINDS = ["central-g", "central-sym2xg", "edge-sym2", "edge-sym2-inv", "edge-sym2-afe"]


@lvalues_router.command(
    "lvalue",
    summary="Central and edge L-values of eigenforms",
    arguments=[
        arg("--weight", type=int, required=True, help="Weight k of f; g has weight 2k"),
        arg("--form-index", type=int, default=0),
        arg("--g-index", type=int, default=0),
        arg("--kind", choices=KINDS, required=True),
        arg("--X", type=float, default=100.0, dest="X", help="Smoothing scale of the edge series"),
        arg("--s", type=float, default=1.0, help="Point of the symmetric-square value"),
    ],
)
def lvalue(args: Namespace, diagnostics: RunDiagnostics) -> LValue:
    tol = args.tol
    k = args.weight
    with timed_operation(f"lvalue_{args.kind}", diagnostics):
        if args.kind == "central-g":
            result = central_value_g(form_library.eigenform(2 * k, args.g_index), k, tol)
        elif args.kind == "central-sym2xg":
            f = form_library.eigenform(k, args.form_index)
            result = central_value_sym2xg(f, form_library.eigenform(2 * k, args.g_index), tol)
        elif args.kind == "edge-sym2-afe":
            result = sym2_value(form_library.eigenform(k, args.form_index), args.s)
        else:
            f = form_library.eigenform(k, args.form_index, budget=edge_budget(k, args.X))
            if args.kind == "edge-sym2":
                result = edge_sym2(f, args.X)
            else:
                result = edge_sym2_inverse(f, args.X)
    diagnostics.update({"truncation": result.truncation, "tail_bound": result.tail_bound})
    return result
