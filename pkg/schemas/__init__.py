from .bessel import BesselAvgConfig, BesselRegime, BoundCheck, PairAvgResult, WeightPreset
from .geometry import NormReport, QuadratureDiagnostics, SpectralResult, WatsonResult
from .lvalues import BumpResult, LValue, LValueKind, MainTermResult
from .report import SCHEMA_VERSION, Command, OutputFormat, Report, RunConfig
from .sums import ExpSumFactorization, ExpSumScanRow, KloostermanParams, PoissonComparison
from .trace import (
    AverageExperiment,
    FormL4Record,
    MaindoneResult,
    PeterssonResult,
    TraceCheckConfig,
)

__all__ = [
    "AverageExperiment",
    "BesselAvgConfig",
    "BesselRegime",
    "BoundCheck",
    "BumpResult",
    "Command",
    "ExpSumFactorization",
    "ExpSumScanRow",
    "FormL4Record",
    "KloostermanParams",
    "LValue",
    "LValueKind",
    "MainTermResult",
    "MaindoneResult",
    "NormReport",
    "OutputFormat",
    "PairAvgResult",
    "PeterssonResult",
    "PoissonComparison",
    "QuadratureDiagnostics",
    "Report",
    "RunConfig",
    "SCHEMA_VERSION",
    "SpectralResult",
    "TraceCheckConfig",
    "WatsonResult",
    "WeightPreset",
]
