"""Keyword-aware optimal route search (C++ core)."""

from ._core import (
    ConstraintError,
    InvalidRouteError,
    KorError,
    Network,
    NoPathError,
    ParameterError,
    ParseError,
    SizeGuardError,
    run_benchmark,
)

__all__ = [
    "ConstraintError",
    "InvalidRouteError",
    "KorError",
    "Network",
    "NoPathError",
    "ParameterError",
    "ParseError",
    "SizeGuardError",
    "run_benchmark",
]
