"""Hybridized cut finite elements for 2D interface problems."""

from ._hycut import (
    Config,
    Partition,
    Solution,
    condnum,
    converge,
    fit_loglog,
    robustness,
    solve,
)

__all__ = [
    "Config",
    "Partition",
    "Solution",
    "condnum",
    "converge",
    "fit_loglog",
    "robustness",
    "solve",
]
