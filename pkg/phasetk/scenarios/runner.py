"""Load scenario files and execute them into CSV/JSON results plus a run manifest.

A run is deterministic for a given scenario file and seed: numeric output is
written with 17 significant digits and JSON keys are sorted, so repeated runs
only differ in the manifest's timestamp.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml
from pydantic import ValidationError

from phasetk import __version__
from phasetk.core.config import normalise_integrator, settings
from phasetk.core.exceptions import ScenarioValidationError
from phasetk.core.observability import get_logger
from phasetk.dynamics.flow import flow_batch, invariance_defect
from phasetk.hamilton_jacobi.export import solution_metadata, solution_table
from phasetk.hamilton_jacobi.solver import hj_solve, max_residual
from phasetk.manifolds.base import ExactManifold
from phasetk.manifolds.caustics import caustic_points
from phasetk.manifolds.phase import loop_period, phase
from phasetk.models.scenario import Scenario, ScenarioKind
from phasetk.scenarios.builders import (
    build_curve,
    build_grid,
    build_hamiltonian,
    build_loops,
    build_manifold,
    build_point,
    phase_point,
)
from phasetk.semiclassical.ebk import ebk_check
from phasetk.semiclassical.wavefunctions import (
    expected_composition_phase,
    gaussian_packet,
    weyl_composition_defect,
    weyl_translate,
)
from phasetk.symplectic.linear import SymplecticMap, is_symplectic, symplectic_defect
from phasetk.transport.phase import invariant_manifold_defect, transport_phase_many

logger = get_logger(__name__)

Row = List[Any]
Table = Tuple[List[str], List[Row]]


@dataclass
class RunResult:
    """Outcome of one scenario run."""

    kind: str
    name: str
    summary: Dict[str, Any]
    files: List[Path] = field(default_factory=list)


@dataclass
class RunContext:
    scenario: Scenario
    steps: Optional[int]
    seed: int
    method: Optional[str]

    def tol(self, name: str) -> float:
        key = name.lower()
        if key in self.scenario.params.tolerances:
            return float(self.scenario.params.tolerances[key])
        return float(getattr(settings, name.upper()))


# ----------------------------------------------------------------------- loading


def _line_of(text: str, loc: Sequence[Any]) -> Optional[int]:
    keys = [part for part in loc if isinstance(part, str)]
    if not keys:
        return None
    key = re.escape(keys[-1])
    pattern = re.compile(rf'("{key}"\s*:)|(^\s*-?\s*{key}\s*:)', re.MULTILINE)
    match = pattern.search(text)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def parse_scenario(text: str, fmt: str = "json") -> Scenario:
    """Validate scenario text; errors carry the offending field path and line."""

    try:
        data = yaml.safe_load(text) if fmt == "yaml" else json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError(f"invalid JSON: {exc.msg}", details={"field": None, "line": exc.lineno}) from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioValidationError(f"invalid YAML: {exc}", details={"field": None, "line": line}) from exc
    if not isinstance(data, dict):
        raise ScenarioValidationError("scenario must be a mapping", details={"field": None, "line": 1})

    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = tuple(error.get("loc", ()))
        path = ".".join(str(part) for part in loc)
        message = f"{path}: {error['msg']}" if path else error["msg"]
        raise ScenarioValidationError(
            message,
            details={"field": path or None, "line": _line_of(text, loc), "errors": len(exc.errors())},
        ) from exc


def load_scenario(path: Path) -> Tuple[Scenario, str]:
    """Read and validate a JSON or YAML scenario file; returns (scenario, raw text)."""

    path = Path(path)
    if not path.exists():
        raise ScenarioValidationError(f"scenario file not found: {path}", details={"field": None, "line": None})
    text = path.read_text(encoding="utf-8")
    fmt = "yaml" if path.suffix.lower() in {".yaml", ".yml"} else "json"
    return parse_scenario(text, fmt), text


# ---------------------------------------------------------------------- runners


def _times(scenario: Scenario) -> List[float]:
    params = scenario.params
    return list(params.times) if params.times else [float(params.t)]


def _run_check(ctx: RunContext) -> Tuple[Table, Dict[str, Any]]:
    params = ctx.scenario.params
    manifold = build_manifold(ctx.scenario.manifold)
    rng = np.random.default_rng(ctx.seed)
    pullback = float(np.max(manifold.pullback_defect(manifold.sample_parameters(100, rng))))
    caustics = caustic_points(manifold, grid=params.samples, tol_caustic=ctx.tol("TOL_CAUSTIC"))
    periods = [
        {"windings": list(loop.windings), "period": loop_period(manifold, loop)}
        for loop in build_loops(manifold, params.loops)
    ]
    summary: Dict[str, Any] = {
        "manifold": repr(manifold),
        "lagrangian": pullback <= ctx.tol("TOL_LAG"),
        "pullback_defect": pullback,
        "caustic_count": len(caustics),
        "periods": periods,
    }
    if params.matrix is not None:
        matrix = np.array(params.matrix, dtype=float)
        symplectic = is_symplectic(matrix, ctx.tol("TOL_SYMP"))
        summary["matrix"] = {
            "symplectic": symplectic,
            "defect": symplectic_defect(matrix),
            "free": SymplecticMap(matrix, ctx.tol("TOL_SYMP")).is_free(ctx.tol("TOL_DET")) if symplectic else None,
        }

    n = manifold.n
    columns = [
        "index",
        *(f"theta{i + 1}" for i in range(n)),
        *(f"x{i + 1}" for i in range(n)),
        *(f"p{i + 1}" for i in range(n)),
    ]
    rows: List[Row] = []
    if len(caustics):
        embedded = manifold.embed_many(caustics.points)
        for index, (theta, z) in enumerate(zip(caustics.points, embedded)):
            rows.append([index, *theta.tolist(), *z.tolist()])
    return (columns, rows), summary


def _run_flow(ctx: RunContext) -> Tuple[Table, Dict[str, Any]]:
    scenario = ctx.scenario
    H = build_hamiltonian(scenario.hamiltonian)
    Z0 = np.array(scenario.params.initial, dtype=float)
    bundle = flow_batch(H, Z0, scenario.params.t0, scenario.params.t, steps=ctx.steps, method=ctx.method)
    n = H.n
    columns = ["point", "t", *(f"x{i + 1}" for i in range(n)), *(f"p{i + 1}" for i in range(n)), "action", "energy"]
    rows: List[Row] = []
    drift = 0.0
    for point in range(bundle.size):
        energies = [float(H.value(bundle.points[k, point], float(t))) for k, t in enumerate(bundle.times)]
        if H.time_independent:
            drift = max(drift, max(abs(e - energies[0]) for e in energies))
        for k, t in enumerate(bundle.times):
            state = bundle.points[k, point].tolist()
            rows.append([point, float(t), *state, float(bundle.action[k, point]), energies[k]])
    summary = {
        "hamiltonian": H.name,
        "final_points": bundle.final_points.tolist(),
        "final_action": bundle.final_action.tolist(),
        "energy_drift": drift if H.time_independent else None,
    }
    return (columns, rows), summary


def _run_transport(ctx: RunContext) -> Tuple[Table, Dict[str, Any]]:
    scenario = ctx.scenario
    params = scenario.params
    H = build_hamiltonian(scenario.hamiltonian)
    manifold = build_manifold(scenario.manifold)
    points = [build_point(manifold, spec) for spec in params.points]
    n = manifold.n
    columns = [
        "point",
        "t",
        *(f"theta{i + 1}" for i in range(n)),
        *(f"x{i + 1}" for i in range(n)),
        *(f"p{i + 1}" for i in range(n)),
        "phase",
        "increment",
    ]
    if params.invariant:
        columns.append("defect")
    initial = [phase(manifold, hp) for hp in points]
    rows: List[Row] = []
    worst = 0.0
    for t in _times(scenario):
        phases, moved = transport_phase_many(H, manifold, points, t, params.t0, steps=ctx.steps, method=ctx.method)
        for index, hp in enumerate(points):
            row = [index, float(t), *hp.lift.tolist(), *moved[index].tolist(), float(phases[index])]
            row.append(float(phases[index]) - initial[index])
            if params.invariant:
                defect = invariant_manifold_defect(
                    H, manifold, hp, t, energy=params.energy, steps=ctx.steps, method=ctx.method
                )
                worst = max(worst, abs(defect))
                row.append(defect)
            rows.append(row)
    summary: Dict[str, Any] = {"hamiltonian": H.name, "manifold": repr(manifold), "points": len(points)}
    if params.invariant:
        summary["max_defect"] = worst
    return (columns, rows), summary


def _run_hj(ctx: RunContext) -> Tuple[Table, Dict[str, Any]]:
    scenario = ctx.scenario
    H = build_hamiltonian(scenario.hamiltonian)
    manifold = build_manifold(scenario.manifold)
    if not isinstance(manifold, ExactManifold):
        raise ScenarioValidationError(
            "hj scenarios need an exact initial manifold (exact or quadratic_graph)",
            details={"field": "manifold.type", "line": None},
        )
    axes = build_grid(scenario.params.grid)
    solution = hj_solve(
        H, manifold, axes, scenario.params.t, steps=ctx.steps, method=ctx.method, tol_caustic=ctx.tol("TOL_CAUSTIC")
    )
    columns = ["t", *(f"x{i + 1}" for i in range(solution.n)), "Phi", "valid"]
    summary = solution_metadata(solution)
    summary["max_residual"] = max_residual(solution, H)
    summary["breakdown_time"] = solution.breakdown_time
    return (columns, solution_table(solution).tolist()), summary


def _run_ebk(ctx: RunContext) -> Tuple[Table, Dict[str, Any]]:
    scenario = ctx.scenario
    manifold = build_manifold(scenario.manifold)
    loops = build_loops(manifold, scenario.params.loops)
    reports = ebk_check(manifold, scenario.params.hbar, loops, tol=ctx.tol("TOL_EBK"))
    k = manifold.n_periodic
    columns = [*(f"w{i + 1}" for i in range(k)), "action", "maslov", "residue", "quantized"]
    rows = [[*r.windings, r.action, r.maslov, r.residue, int(r.quantized)] for r in reports]
    summary = {
        "hbar": scenario.params.hbar,
        "quantized": all(r.quantized for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    return (columns, rows), summary


def _run_weyl(ctx: RunContext) -> Tuple[Table, Dict[str, Any]]:
    params = ctx.scenario.params
    grid = build_grid(params.grid)[0]
    packet = params.packet
    wf = gaussian_packet(grid, packet.x0, packet.p0, packet.width, params.hbar)
    z_a = phase_point(params.z_a, "params.z_a")
    moved = weyl_translate(wf, z_a, interpolate=params.interpolate)
    summary: Dict[str, Any] = {"norm": wf.norm(), "norm_defect": abs(moved.norm() - wf.norm())}
    if params.z_b is not None:
        z_b = phase_point(params.z_b, "params.z_b")
        mean_phase, deviation = weyl_composition_defect(wf, z_a, z_b, interpolate=params.interpolate)
        summary["composition"] = {
            "phase": mean_phase,
            "expected": expected_composition_phase(z_a, z_b, params.hbar),
            "max_deviation": deviation,
        }
    columns = ["x", "re_in", "im_in", "re_out", "im_out"]
    rows = [
        [float(x), float(a.real), float(a.imag), float(b.real), float(b.imag)]
        for x, a, b in zip(grid, wf.values, moved.values)
    ]
    return (columns, rows), summary


def _run_invariance(ctx: RunContext) -> Tuple[Table, Dict[str, Any]]:
    scenario = ctx.scenario
    params = scenario.params
    H = build_hamiltonian(scenario.hamiltonian)
    curve = build_curve(params.curve, "params.curve")
    counts = params.refinements or [params.samples]
    rows: List[Row] = []
    for count in counts:
        s = np.linspace(0.0, params.curve.duration, count)
        defect = invariance_defect(H, curve.points(s), params.t, params.t0, steps=ctx.steps, method=ctx.method)
        rows.append([count, defect])
    worst = max(abs(row[1]) for row in rows)
    summary = {
        "hamiltonian": H.name,
        "max_defect": worst,
        "passed": worst <= ctx.tol("TOL_INVARIANCE"),
    }
    return (["samples", "defect"], rows), summary


RUNNERS: Dict[ScenarioKind, Callable[[RunContext], Tuple[Table, Dict[str, Any]]]] = {
    ScenarioKind.CHECK: _run_check,
    ScenarioKind.FLOW: _run_flow,
    ScenarioKind.TRANSPORT: _run_transport,
    ScenarioKind.HJ: _run_hj,
    ScenarioKind.EBK: _run_ebk,
    ScenarioKind.WEYL: _run_weyl,
    ScenarioKind.INVARIANCE: _run_invariance,
}


# ----------------------------------------------------------------------- output


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""

    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else str(number)
    return value


def write_table(path: Path, columns: Sequence[str], rows: Sequence[Row]) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return path


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path.write_text(json.dumps(jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _context(scenario: Scenario, seed: Optional[int], steps: Optional[int]) -> RunContext:
    method = scenario.params.method
    if method is not None:
        try:
            method = normalise_integrator(method)
        except ValueError as exc:
            raise ScenarioValidationError(str(exc), details={"field": "params.method", "line": None}) from exc
    if seed is None:
        seed = scenario.params.seed if scenario.params.seed is not None else settings.DEFAULT_SEED
    return RunContext(scenario=scenario, steps=steps or scenario.params.steps, seed=int(seed), method=method)


def run_scenario(
    scenario: Scenario,
    out_dir: Path,
    seed: Optional[int] = None,
    steps: Optional[int] = None,
    source_text: Optional[str] = None,
    kind: Optional[ScenarioKind] = None,
) -> RunResult:
    """Execute ``scenario`` and write ``<prefix>.csv``, ``<prefix>.json`` and ``manifest.json``."""

    if kind is not None and scenario.kind is not kind:
        raise ScenarioValidationError(
            f"scenario kind is '{scenario.kind.value}', expected '{kind.value}'",
            details={"field": "kind", "line": None},
        )
    ctx = _context(scenario, seed, steps)
    (columns, rows), summary = RUNNERS[scenario.kind](ctx)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = scenario.output.prefix
    files: List[Path] = []
    if scenario.output.csv:
        files.append(write_table(out_dir / f"{prefix}.csv", columns, rows))
    if scenario.output.json_:
        payload = {"kind": scenario.kind.value, "name": scenario.name, **summary}
        files.append(write_json(out_dir / f"{prefix}.json", payload))

    tolerances = settings.tolerances()
    tolerances.update({key.lower(): float(value) for key, value in scenario.params.tolerances.items()})
    manifest = {
        "scenario": scenario.model_dump(mode="json", by_alias=True),
        "input_sha256": hashlib.sha256(source_text.encode("utf-8")).hexdigest() if source_text is not None else None,
        "version": __version__,
        "integrator": ctx.method or settings.INTEGRATOR or "auto",
        "steps": ctx.steps or settings.DEFAULT_STEPS,
        "seed": ctx.seed,
        "tolerances": tolerances,
        "outputs": [path.name for path in files],
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    files.append(write_json(out_dir / "manifest.json", manifest))
    logger.info("scenario.completed", kind=scenario.kind.value, name=scenario.name, outputs=[p.name for p in files])
    return RunResult(kind=scenario.kind.value, name=scenario.name, summary=jsonable(summary), files=files)


__all__ = [
    "RunResult",
    "RUNNERS",
    "parse_scenario",
    "load_scenario",
    "run_scenario",
    "write_table",
    "write_json",
    "jsonable",
]
