"""Plot-ready dumps of Hamilton–Jacobi solutions."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import numpy as np

from phasetk.hamilton_jacobi.solver import HJSolution

FLOAT_FORMAT = "%.17g"


def solution_table(solution: HJSolution) -> np.ndarray:
    """Rows (t, x1..xn, Phi, valid) in time-major, C-ordered grid order."""

    nodes = solution.nodes
    blocks = []
    for index, t in enumerate(solution.times):
        values = solution.phi[index].reshape(-1)
        valid = np.isfinite(values).astype(float)
        blocks.append(np.column_stack([np.full(nodes.shape[0], t), nodes, values, valid]))
    return np.vstack(blocks)


def write_solution_csv(solution: HJSolution, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = ["t", *(f"x{i + 1}" for i in range(solution.n)), "Phi", "valid"]
    np.savetxt(path, solution_table(solution), delimiter=",", fmt=FLOAT_FORMAT, header=",".join(columns), comments="")
    return path


def solution_metadata(solution: HJSolution) -> dict[str, Any]:
    until = solution.valid_until
    finite = np.isfinite(until)
    return {
        "n": solution.n,
        "grid": [
            {"min": float(axis[0]), "max": float(axis[-1]), "nodes": int(axis.size)} for axis in solution.axes
        ],
        "times": {
            "t0": float(solution.times[0]),
            "t_max": float(solution.times[-1]),
            "samples": int(solution.times.size),
        },
        "breakdown": {
            "time": float(until.min()) if finite.any() else None,
            "cells": int(finite.sum()),
            "total_cells": int(until.size),
        },
        "valid_fraction": float(solution.valid.mean()),
    }


def write_solution_metadata(solution: HJSolution, path: Path, extra: Optional[dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = solution_metadata(solution)
    if extra:
        payload.update(extra)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


__all__ = [
    "solution_table",
    "solution_metadata",
    "write_solution_csv",
    "write_solution_metadata",
]
