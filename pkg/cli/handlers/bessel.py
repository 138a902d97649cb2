import logging
from argparse import Namespace
from typing import Any, Dict, List, Union

from pydantic import BaseModel

from core.errors import InputValidationError
from core.run_logging import RunDiagnostics, timed_operation
from schemas.bessel import BesselAvgConfig, WeightPreset
from services.special_fn import (
    bessel_avg_pair,
    bessel_avg_single,
    bigx_profile,
    breakdown_scan,
    pair_bound_checks,
    weight_function,
)

from ..router import CommandRouter, arg


logger = logging.getLogger(__name__)

bessel_router = CommandRouter()

MODES = ["pair", "single", "bounds", "bigx", "breakdown"]


def _require(value, name: str, mode: str):
    if value is None:
        raise InputValidationError(f"--{name} is required in mode {mode}")
    return value


@bessel_router.command(
    "bessel-avg",
    summary="Averages of J-Bessel functions over the weight k",
    arguments=[
        arg("--mode", choices=MODES, default="pair"),
        arg("--K", type=float, required=True, dest="K"),
        arg("--x", type=float, default=None),
        arg("--y", type=float, default=None),
        arg("--h", choices=[p.value for p in WeightPreset], default=WeightPreset.BUMP.value),
        arg("--exponents", type=float, nargs="+", default=[1.4, 1.5, 1.6, 1.7, 1.8]),
    ],
)
def bessel_avg(args: Namespace, diagnostics: RunDiagnostics) -> Union[Dict[str, Any], List[Any]]:
    """
    Run one Bessel-average experiment.

    Args:
        args: parsed flags (mode, K, x, y, h, exponents)
        diagnostics: run diagnostics to fill

    Returns:
        Records of the chosen mode
    """
    mode = args.mode
    cfg = BesselAvgConfig(K=args.K, h=args.h, x=args.x, y=args.y, parity=4 if mode == "single" else 2)
    with timed_operation(f"bessel_{mode}", diagnostics):
        if mode == "single":
            y = _require(cfg.y, "y", mode)
            value = bessel_avg_single(cfg, y)
            target = float(weight_function(cfg.h)(y / cfg.K))
            return {"K": cfg.K, "y": y, "value": value, "weight": target, "residual": value - target}
        if mode == "pair":
            return bessel_avg_pair(cfg, _require(cfg.x, "x", mode), _require(cfg.y, "y", mode))
        if mode == "bounds":
            checks: List[BaseModel] = pair_bound_checks(cfg, _require(cfg.x, "x", mode), _require(cfg.y, "y", mode))
            diagnostics.record("failed_bounds", [c.bound_name for c in checks if not c.passed])
            return checks
        if mode == "bigx":
            return bigx_profile(cfg.K, _require(cfg.x, "x", mode), cfg.h)
        return breakdown_scan(cfg.K, args.exponents, cfg.h)
