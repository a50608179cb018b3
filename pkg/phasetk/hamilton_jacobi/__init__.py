"""Hamilton–Jacobi Cauchy problem by the method of characteristics."""

from phasetk.hamilton_jacobi.export import (
    solution_metadata,
    solution_table,
    write_solution_csv,
    write_solution_metadata,
)
from phasetk.hamilton_jacobi.solver import HJSolution, breakdown_time, hj_residual, hj_solve, max_residual

__all__ = [
    "HJSolution",
    "breakdown_time",
    "hj_residual",
    "hj_solve",
    "max_residual",
    "solution_metadata",
    "solution_table",
    "write_solution_csv",
    "write_solution_metadata",
]
