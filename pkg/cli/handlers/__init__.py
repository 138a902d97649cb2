from .bessel import bessel_router
from .forms import forms_router
from .geometry import geometry_router
from .lvalues import lvalues_router
from .sums import sums_router
from .trace import trace_router

__all__ = [
    "bessel_router",
    "forms_router",
    "geometry_router",
    "lvalues_router",
    "sums_router",
    "trace_router",
]
