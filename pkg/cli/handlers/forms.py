import logging
from argparse import Namespace
from typing import Any, Dict, List

from core.run_logging import RunDiagnostics, timed_operation
from services.form_library import form_library
from services.hecke_core import charpoly_coefficients, cusp_dimension, hecke_matrix

from ..router import CommandRouter, arg


logger = logging.getLogger(__name__)

forms_router = CommandRouter()


@forms_router.command(
    "basis",
    summary="Victor Miller basis of S_k with exact integer coefficients",
    arguments=[
        arg("--weight", type=int, required=True),
        arg("--terms", type=int, default=20, help="Coefficients printed per basis element"),
    ],
)
def basis(args: Namespace, diagnostics: RunDiagnostics) -> Dict[str, Any]:
    """
    Build the echelon basis of S_k.

    Args:
        args: parsed flags (weight, terms)
        diagnostics: run diagnostics to fill

    Returns:
        Dimension, truncation, basis rows and the characteristic polynomial of T_2
    """
    d = cusp_dimension(args.weight)
    truncation = max(args.terms, 2 * d + 1)
    with timed_operation("basis", diagnostics):
        space = form_library.space(args.weight, truncation)
        charpoly = charpoly_coefficients(hecke_matrix(space, 2)) if d else ()
    diagnostics.record("truncation", truncation)
    return {
        "weight": space.weight,
        "dimension": space.dimension,
        "basis": [list(row[1 : args.terms + 1]) for row in space.rows],
        "t2_charpoly": [int(c) for c in charpoly],
    }


@forms_router.command(
    "eigen",
    summary="Hecke eigenforms of S_k with Deligne-normalized coefficients",
    arguments=[
        arg("--weight", type=int, required=True),
        arg("--terms", type=int, default=10),
        arg("--budget", type=int, default=None, help="Coefficient budget; weight-dependent default"),
    ],
)
def eigen(args: Namespace, diagnostics: RunDiagnostics) -> List[Dict[str, Any]]:
    with timed_operation("eigenforms", diagnostics):
        forms = form_library.eigenforms(args.weight, args.budget)
    if forms:
        diagnostics.record("budget", forms[0].budget)
    logger.info(f"Weight {args.weight}: {len(forms)} eigenforms")
    return [
        {
            "weight": f.weight,
            "label": f.label,
            "lambda2": float(f.lambda2),
            "t2_charpoly": [int(c) for c in f.charpoly2],
            "a": [f.coefficient(n) for n in range(1, args.terms + 1)],
        }
        for f in forms
    ]
