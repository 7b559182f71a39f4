"""Built-in recoverable data types."""

from __future__ import annotations

from ..core import AdtSpec, FrameworkError
from .boolean import BOOLEAN
from .real import REAL
from .sets import SET
from .stack import STACK


class UnknownAdt(FrameworkError):
    pass


_REGISTRY: dict[str, AdtSpec] = {}


def register(spec: AdtSpec):
    if spec.name in _REGISTRY:
        raise FrameworkError(f"data type {spec.name} already registered")
    _REGISTRY[spec.name] = spec


def get_adt(name: str) -> AdtSpec:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownAdt(
            f"unknown data type {name!r} (have: {', '.join(sorted(_REGISTRY))})"
        ) from None


def builtin_names() -> list[str]:
    return sorted(_REGISTRY)


for _spec in (STACK, SET, REAL, BOOLEAN):
    register(_spec)
