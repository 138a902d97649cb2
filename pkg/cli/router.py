import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from core.run_logging import RunDiagnostics


Handler = Callable[[argparse.Namespace, RunDiagnostics], Any]


def arg(*flags: str, **options: Any) -> Tuple[Tuple[str, ...], Dict[str, Any]]:
    """Argument definition passed straight to ``add_argument``."""
    return flags, options


@dataclass
class Route:
    name: str
    handler: Handler
    summary: str = ""
    arguments: List[Tuple[Tuple[str, ...], Dict[str, Any]]] = field(default_factory=list)
    tags: List[str] = field(default_factory=list)


class CommandRouter:
    """Collects subcommands the way an API router collects endpoints."""

    def __init__(self) -> None:
        self.routes: Dict[str, Route] = {}

    def command(self, name: str, *, summary: str = "", arguments: Sequence = ()) -> Callable[[Handler], Handler]:
        def decorator(handler: Handler) -> Handler:
            if name in self.routes:
                raise ValueError(f"Subcommand {name} is already registered")
            self.routes[name] = Route(name=name, handler=handler, summary=summary, arguments=list(arguments))
            return handler

        return decorator

    def include_router(self, router: "CommandRouter", tags: Optional[List[str]] = None) -> None:
        for name, route in router.routes.items():
            if name in self.routes:
                raise ValueError(f"Subcommand {name} is already registered")
            self.routes[name] = Route(
                name=route.name,
                handler=route.handler,
                summary=route.summary,
                arguments=route.arguments,
                tags=route.tags + list(tags or []),
            )

    def build_parser(self, prog: str, common: argparse.ArgumentParser) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=prog, parents=[common])
        subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
        for route in self.routes.values():
            sub = subparsers.add_parser(route.name, help=route.summary, parents=[common])
            for flags, options in route.arguments:
                sub.add_argument(*flags, **options)
        return parser
