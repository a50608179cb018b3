"""Command line entry for the phase toolkit (``ptk``)."""

from __future__ import annotations

import sys
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Optional, Tuple

import click

from phasetk import __version__
from phasetk.core.config import settings
from phasetk.core.exceptions import EXIT_NUMERICAL_FAILURE, EXIT_OK, PhaseToolkitError
from phasetk.core.observability import configure_logging, get_logger
from phasetk.models.scenario import ScenarioKind
from phasetk.scenarios.runner import load_scenario, run_scenario
from phasetk.validation.harness import OracleHarness

logger = get_logger(__name__)


def _handle_errors(func: Callable[..., Any]) -> Callable[..., Any]:
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except PhaseToolkitError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


@click.group()
@click.version_option(__version__, prog_name="ptk")
@click.option("--log-level", default=None, help="Log level (defaults to PTK_LOG_LEVEL).")
@click.option("--log-format", type=click.Choice(["console", "json"]), default=None, help="Log renderer.")
def cli(log_level: Optional[str], log_format: Optional[str]) -> None:
    """Phase transport on Lagrangian manifolds and the checks built on it."""

    configure_logging(log_level, log_format)


def _scenario_command(kind: ScenarioKind, help_text: str) -> None:
    @cli.command(name=kind.value, help=help_text)
    @click.option(
        "--scenario",
        "scenario_path",
        required=True,
        type=click.Path(path_type=Path, dir_okay=False),
        help="Scenario file (JSON or YAML).",
    )
    @click.option("--out", "out_dir", type=click.Path(path_type=Path, file_okay=False), default=None)
    @click.option("--seed", type=int, default=None, help="Override the scenario seed.")
    @click.option("--steps", type=click.IntRange(min=1), default=None, help="Override the integrator step count.")
    @_handle_errors
    def command(scenario_path: Path, out_dir: Optional[Path], seed: Optional[int], steps: Optional[int]) -> None:
        scenario, text = load_scenario(scenario_path)
        result = run_scenario(
            scenario,
            out_dir or settings.OUTPUT_DIR,
            seed=seed,
            steps=steps,
            source_text=text,
            kind=kind,
        )
        for path in result.files:
            click.echo(str(path))
        sys.exit(EXIT_OK)


_scenario_command(ScenarioKind.CHECK, "Check a manifold: Lagrangian defect, caustics, loop periods.")
_scenario_command(ScenarioKind.FLOW, "Integrate trajectories with their action.")
_scenario_command(ScenarioKind.TRANSPORT, "Transport phases of cover points under a flow.")
_scenario_command(ScenarioKind.HJ, "Solve the Hamilton-Jacobi equation by characteristics.")
_scenario_command(ScenarioKind.EBK, "Quantization residues for every loop class.")
_scenario_command(ScenarioKind.WEYL, "Weyl translations of a sampled wavefunction.")
_scenario_command(ScenarioKind.INVARIANCE, "Relative integral invariant under refinement.")


@cli.command()
@click.option("--tag", "tags", multiple=True, help="Oracle tag to run (repeatable); default runs every case.")
@click.option(
    "--cases",
    "cases_path",
    type=click.Path(path_type=Path, dir_okay=False),
    default=None,
    help="Oracle cases file; defaults to the bundled cases.",
)
@click.option("--seed", type=int, default=None, help="Offset added to every case seed.")
@click.option("--out", "out_path", type=click.Path(path_type=Path, dir_okay=False), default=None)
@_handle_errors
def selftest(tags: Tuple[str, ...], cases_path: Optional[Path], seed: Optional[int], out_path: Optional[Path]) -> None:
    """Compare closed-form phase laws against numerical transport."""

    harness = OracleHarness(seed=seed)
    if cases_path is None:
        harness.load_default_cases()
    else:
        harness.load_cases_from_file(cases_path)
    report = harness.run_all(tags)
    for tag, entry in sorted(report["tags"].items()):
        verdict = "PASS" if entry["passed"] else "FAIL"
        click.echo(f"{verdict} {tag} ({entry['law']}) max_error={entry['max_error']:.3e} cases={entry['cases']}")
    if out_path is not None:
        harness.save_results(report, out_path)
    sys.exit(EXIT_OK if report["passed"] else EXIT_NUMERICAL_FAILURE)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
