from .dispatch import dispatch
from .routers import command_router

__all__ = ["command_router", "dispatch"]
