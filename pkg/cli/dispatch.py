import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from core.config import settings
from core.errors import WorkbenchError
from core.run_logging import RunDiagnostics
from schemas.report import OutputFormat, Report, RunConfig
from services.form_library import form_library
from services.report_writer import report_renderer, write_report

from .routers import command_router


logger = logging.getLogger(__name__)

PROG = "l4wb"
COMMON_FLAGS = {"tol", "cache_dir", "threads", "output", "format", "summary", "log_level", "subcommand"}


def common_parser() -> argparse.ArgumentParser:
    """Run options accepted before or after the subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--cache-dir", default=argparse.SUPPRESS)
    parser.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--output", default=argparse.SUPPRESS)
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=argparse.SUPPRESS)
    parser.add_argument("--summary", action="store_true", default=argparse.SUPPRESS)
    parser.add_argument("--log-level", default=argparse.SUPPRESS)
    return parser


def build_parser() -> argparse.ArgumentParser:
    return command_router.build_parser(PROG, common_parser())


def _payload(result: Any) -> Any:
    if isinstance(result, BaseModel):
        return result.model_dump(mode="json", by_alias=True)
    if isinstance(result, list):
        return [_payload(item) for item in result]
    return result


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        tol=getattr(args, "tol", settings.default_tol),
        cache_dir=getattr(args, "cache_dir", settings.cache_dir),
        threads=getattr(args, "threads", settings.threads),
        output=getattr(args, "output", None),
        format=getattr(args, "format", OutputFormat.JSON),
    )


def run(args: argparse.Namespace, config: RunConfig) -> Report:
    """Execute the routed handler and wrap its result in a report."""
    route = command_router.routes[config.subcommand.value]
    form_library.configure(config.cache_dir, settings.cache_enabled)
    args.tol = config.tol
    args.threads = config.threads

    diagnostics = RunDiagnostics()
    logger.info(f"Running {route.name} ({', '.join(route.tags)})")
    result = route.handler(args, diagnostics)

    parameters: Dict[str, Any] = {key: value for key, value in vars(args).items() if key not in COMMON_FLAGS}
    return Report(
        command=config.subcommand,
        inputs={**config.model_dump(mode="json"), **parameters},
        results=_payload(result),
        diagnostics=diagnostics.as_dict(),
    )


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the subcommand and return the process exit code."""
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2

    if hasattr(args, "log_level"):
        logging.getLogger().setLevel(args.log_level.upper())

    try:
        config = _run_config(args)
        report = run(args, config)
        write_report(report, config)
    except ValidationError as e:
        logger.error(f"Invalid input for {args.subcommand}: {str(e)}")
        return 2
    except WorkbenchError as e:
        logger.error(f"{args.subcommand} failed: {str(e)}")
        sys.stderr.write(f"{PROG} {args.subcommand}: {e}\n")
        return e.exit_code

    if getattr(args, "summary", False):
        sys.stderr.write(report_renderer.render_summary(report))
    return 0


__all__ = ["build_parser", "dispatch", "run"]
