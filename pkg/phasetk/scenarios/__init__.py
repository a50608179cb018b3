"""Declarative scenario files: schema validation, builders and the runner."""

from phasetk.scenarios.runner import RUNNERS, RunResult, load_scenario, parse_scenario, run_scenario

__all__ = ["RUNNERS", "RunResult", "load_scenario", "parse_scenario", "run_scenario"]
