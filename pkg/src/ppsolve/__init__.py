"""Exact least fixed points of max/min probabilistic polynomial systems."""

from .bssg import check_candidate, solve_exhaustive
from .gnm import solve
from .policy import epsilon_policy
from .qualitative import reduce
from .textio import parse_system, read_system

__all__ = ["check_candidate", "epsilon_policy", "parse_system", "read_system", "reduce",
           "solve", "solve_exhaustive"]
