from .handlers import (
    bessel_router,
    forms_router,
    geometry_router,
    lvalues_router,
    sums_router,
    trace_router,
)
from .router import CommandRouter


# Create main command router
command_router = CommandRouter()

# Include modular form routes
command_router.include_router(forms_router, tags=["forms"])

# Include exponential sum routes
command_router.include_router(sums_router, tags=["sums"])

# Include Bessel average routes
command_router.include_router(bessel_router, tags=["bessel"])

# Include L-value routes
command_router.include_router(lvalues_router, tags=["lvalues"])

# Include fundamental domain routes
command_router.include_router(geometry_router, tags=["geometry"])

# Include trace formula routes
command_router.include_router(trace_router, tags=["trace"])
