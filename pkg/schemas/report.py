from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field

SCHEMA_VERSION = "l4wb/1"


class Command(str, Enum):
    """Subcommands of the workbench."""
    BASIS = "basis"
    EIGEN = "eigen"
    KLOOSTERMAN = "kloosterman"
    EXPSUM_SCAN = "expsum-scan"
    BESSEL_AVG = "bessel-avg"
    LVALUE = "lvalue"
    L4 = "l4"
    WATSON = "watson"
    TRACE_CHECK = "trace-check"
    MAINDONE_CHECK = "maindone-check"
    THEOREM_AVG = "theorem-avg"
    POISSON_CHECK = "poisson-check"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """Validated per-run options shared by every subcommand."""
    subcommand: Command
    tol: float = Field(default=1e-8, ge=1e-12, le=1e-2)
    cache_dir: Path
    threads: int = Field(default=1, ge=1)
    output: Optional[Path] = Field(None, description="Report path; stdout when omitted")
    format: OutputFormat = Field(default=OutputFormat.JSON)

    class Config:
        json_schema_extra = {
            "example": {
                "subcommand": "kloosterman",
                "tol": 1e-8,
                "cache_dir": ".l4wb-cache",
                "threads": 1,
                "output": None,
                "format": "json",
            }
        }


class Report(BaseModel):
    """Structured result of one subcommand run."""
    schema_version: str = Field(default=SCHEMA_VERSION)
    command: Command
    inputs: Dict[str, Any] = Field(default_factory=dict)
    results: Union[List[Dict[str, Any]], Dict[str, Any]]
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
