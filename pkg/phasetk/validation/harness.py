"""Oracle harness: compare closed-form phase laws against flow/quadrature."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from phasetk.core.exceptions import PhaseToolkitError, ScenarioValidationError
from phasetk.core.observability import get_logger
from phasetk.validation.oracles import LAWS, ORACLES

logger = get_logger(__name__)

DEFAULT_CASES = "oracle_cases.json"


@dataclass
class OracleCase:
    """One oracle tag with its randomization parameters and pass tolerance."""

    case_id: str
    tag: str
    tolerance: float
    seed: int = 0
    params: Dict[str, Any] = field(default_factory=dict)
    description: Optional[str] = None


@dataclass
class OracleResult:
    case_id: str
    tag: str
    passed: bool
    max_error: float
    trials: int
    tolerance: float
    execution_time_ms: float
    error: Optional[str] = None


class OracleHarness:
    """Runs oracle cases and aggregates pass/fail per tag."""

    def __init__(self, cases: Optional[List[OracleCase]] = None, seed: Optional[int] = None) -> None:
        self.cases: List[OracleCase] = list(cases or [])
        self.seed = seed

    def load_cases_from_file(self, file_path: Path | str) -> None:
        """
        Load oracle cases from a JSON file.

        Expected format:
        {
            "oracle_cases": [
                {
                    "case_id": "translation-torus",
                    "tag": "eg1",
                    "tolerance": 1e-9,
                    "seed": 7,
                    "params": {"n": 2, "trials": 10}
                }
            ]
        }
        """
        path = Path(file_path)
        if not path.exists():
            raise FileNotFoundError(f"Oracle cases file not found: {file_path}")
        data = json.loads(path.read_text())
        self._extend(data, str(path))

    def load_default_cases(self) -> None:
        text = resources.files("phasetk.validation").joinpath(DEFAULT_CASES).read_text()
        self._extend(json.loads(text), DEFAULT_CASES)

    def _extend(self, data: Dict[str, Any], source: str) -> None:
        before = len(self.cases)
        for case_data in data.get("oracle_cases", []):
            tag = case_data["tag"]
            if tag not in ORACLES:
                raise ScenarioValidationError(f"unknown oracle tag {tag!r}", details={"field": "tag", "source": source})
            self.cases.append(
                OracleCase(
                    case_id=case_data.get("case_id", tag),
                    tag=tag,
                    tolerance=float(case_data["tolerance"]),
                    seed=int(case_data.get("seed", 0)),
                    params=case_data.get("params", {}),
                    description=case_data.get("description"),
                )
            )
        logger.info("oracle.cases_loaded", count=len(self.cases) - before, source=source)

    def add_case(self, case: OracleCase) -> None:
        if case.tag not in ORACLES:
            raise ScenarioValidationError(f"unknown oracle tag {case.tag!r}", details={"field": "tag"})
        self.cases.append(case)

    @property
    def tags(self) -> List[str]:
        return sorted({case.tag for case in self.cases})

    def select(self, tags: Optional[Iterable[str]] = None) -> List[OracleCase]:
        wanted = set(tags or ())
        unknown = wanted - set(ORACLES)
        if unknown:
            raise ScenarioValidationError(
                f"unknown oracle tag(s): {', '.join(sorted(unknown))}", details={"field": "tag"}
            )
        selected = [case for case in self.cases if not wanted or case.tag in wanted]
        if not selected:
            raise ScenarioValidationError("no oracle cases selected", details={"field": "tag", "tags": sorted(wanted)})
        return selected

    def run_case(self, case: OracleCase) -> OracleResult:
        seed = case.seed if self.seed is None else case.seed + self.seed
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            pairs = ORACLES[case.tag](case.params, rng)
        except PhaseToolkitError as exc:
            elapsed = (time.perf_counter() - start) * 1000
            logger.error("oracle.case_failed", case_id=case.case_id, tag=case.tag, error=exc.message)
            return OracleResult(case.case_id, case.tag, False, math.inf, 0, case.tolerance, elapsed, error=exc.message)
        elapsed = (time.perf_counter() - start) * 1000

        errors = [abs(computed - expected) for computed, expected in pairs]
        max_error = max(errors) if errors else 0.0
        passed = bool(errors) and all(math.isfinite(e) for e in errors) and max_error <= case.tolerance
        logger.info(
            "oracle.case",
            case_id=case.case_id,
            tag=case.tag,
            passed=passed,
            max_error=max_error,
            tolerance=case.tolerance,
            trials=len(pairs),
        )
        return OracleResult(case.case_id, case.tag, passed, max_error, len(pairs), case.tolerance, elapsed)

    def run_all(self, tags: Optional[Iterable[str]] = None) -> Dict[str, Any]:
        """Run the selected cases and compute per-tag verdicts."""

        selected = self.select(tags)
        results = [self.run_case(case) for case in selected]

        by_tag: Dict[str, Dict[str, Any]] = {}
        for result in results:
            entry = by_tag.setdefault(
                result.tag, {"law": LAWS.get(result.tag, result.tag), "passed": True, "max_error": 0.0, "cases": 0}
            )
            entry["passed"] = entry["passed"] and result.passed
            entry["max_error"] = max(entry["max_error"], result.max_error)
            entry["cases"] += 1

        return {
            "case_count": len(selected),
            "passed": all(entry["passed"] for entry in by_tag.values()),
            "tags": by_tag,
            "results": [asdict(result) for result in results],
        }

    @staticmethod
    def save_results(results: Dict[str, Any], output_path: Path | str) -> Path:
        results = dict(results, timestamp=datetime.now(timezone.utc).isoformat())
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(results, indent=2, sort_keys=True, default=str))
        logger.info("oracle.results_saved", path=str(path))
        return path
