import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from jinja2 import Environment, FileSystemLoader, TemplateNotFound

from core.config import settings
from schemas.report import OutputFormat, Report, RunConfig


logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent
SIGNIFICANT_DIGITS = 15


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return format(value, f".{SIGNIFICANT_DIGITS}g")
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return str(value)


def report_rows(report: Report) -> List[Dict[str, Any]]:
    results = report.results
    return list(results) if isinstance(results, list) else [results]


def render_csv(report: Report) -> str:
    """Flatten the results of a report into CSV rows at 15 significant digits."""
    rows = report_rows(report)
    columns: List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(row.get(key)) for key in columns})
    return buffer.getvalue()


def render_json(report: Report) -> str:
    return report.model_dump_json(indent=2)


def write_report(report: Report, config: RunConfig) -> Optional[Path]:
    """Write the report to ``config.output`` (stdout when unset) in the requested format."""
    text = render_csv(report) if config.format == OutputFormat.CSV else render_json(report)
    if config.output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return None
    config.output.parent.mkdir(parents=True, exist_ok=True)
    config.output.write_text(text, encoding="utf-8")
    logger.info(f"Report written to {config.output}")
    return config.output


class ReportRenderer:
    """Plain-text run summaries from jinja2 templates."""

    def __init__(self, template_dir: Optional[Path] = None):
        template_path = Path(template_dir or settings.template_dir)
        if not template_path.is_absolute():
            template_path = PROJECT_ROOT / template_path
        if not template_path.exists():
            raise FileNotFoundError(f"Template directory not found: {template_path}")

        self.jinja_env = Environment(
            loader=FileSystemLoader(template_path),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
        )

    def render_summary(self, report: Report, template_name: str = "summary.txt.j2") -> str:
        """
        Render the text summary of a report.

        Args:
            report: Report produced by a subcommand
            template_name: Template file inside the template directory

        Returns:
            Rendered summary text
        """
        try:
            template = self.jinja_env.get_template(template_name)
        except TemplateNotFound:
            logger.error(f"Template not found: {template_name}")
            raise
        rows = report_rows(report)
        return template.render(
            schema_version=report.schema_version,
            command=report.command.value,
            inputs=report.inputs,
            rows=rows,
            columns=list(rows[0].keys()) if rows else [],
            diagnostics=report.diagnostics,
            fmt=_cell,
        )


# Global renderer instance
report_renderer = ReportRenderer()
