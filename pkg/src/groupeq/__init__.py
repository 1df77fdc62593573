"""Finite-group toolkit: structure analysis, extended-signature term language,
exhaustive equation/identity deciders, and coloring/SAT gadget compilers."""

from .errors import GroupEqError
from .groups import FiniteGroup, build_from_permutations, build_from_table, builtin

__version__ = "0.1.0"

__all__ = [
    "GroupEqError",
    "FiniteGroup",
    "build_from_table",
    "build_from_permutations",
    "builtin",
    "__version__",
]
