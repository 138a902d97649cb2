from .form_library import FormLibrary, form_library
from .qcache import QCache
from .report_writer import ReportRenderer, report_renderer

__all__ = ["FormLibrary", "QCache", "ReportRenderer", "form_library", "report_renderer"]
