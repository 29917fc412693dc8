from .lp import export_lp, import_solution, lp_variable_count
from .search import (
    BudgetExhausted,
    Infeasible,
    Proof,
    SolveOutcome,
    SolverConfig,
    SolverLimitError,
    SolveStats,
    solve,
)

__all__ = [
    "BudgetExhausted",
    "Infeasible",
    "Proof",
    "SolveOutcome",
    "SolveStats",
    "SolverConfig",
    "SolverLimitError",
    "export_lp",
    "import_solution",
    "lp_variable_count",
    "solve",
]
