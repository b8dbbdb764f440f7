"""LP and binary MIP solvers plus brute-force enumeration oracles."""

from .branch import solve_mip
from .enumerate import enumerate_binary_solutions
from .model import INF, Integrality, LpSolution, MipModel, Mode, Sense, Status, Variable
from .simplex import dual_bound, solve_lp

__all__ = [
    "INF",
    "Integrality",
    "LpSolution",
    "MipModel",
    "Mode",
    "Sense",
    "Status",
    "Variable",
    "dual_bound",
    "enumerate_binary_solutions",
    "solve_lp",
    "solve_mip",
]
