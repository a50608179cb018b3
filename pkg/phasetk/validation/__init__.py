"""Oracle cases comparing closed-form phase laws with numerical transport."""

from phasetk.validation.harness import OracleCase, OracleHarness, OracleResult
from phasetk.validation.oracles import LAWS, ORACLES

__all__ = ["LAWS", "ORACLES", "OracleCase", "OracleHarness", "OracleResult"]
