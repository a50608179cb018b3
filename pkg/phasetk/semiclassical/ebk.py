"""EBK quantization test: (1/2πħ)|∮ p dx| − |m|/4 must be an integer on every loop."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Optional, Sequence

from phasetk.core.config import settings
from phasetk.core.observability import get_logger
from phasetk.manifolds.base import LagrangianManifold
from phasetk.manifolds.homotopy import LoopClass
from phasetk.manifolds.phase import loop_period
from phasetk.semiclassical.maslov import maslov_index

logger = get_logger(__name__)


@dataclass(frozen=True)
class EBKReport:
    """Quantization verdict for one loop; ``action`` keeps the orientation sign."""

    windings: tuple[int, ...]
    action: float
    maslov: int
    residue: float
    quantized: bool

    def to_dict(self) -> dict[str, Any]:
        payload = asdict(self)
        payload["windings"] = list(self.windings)
        return payload


def ebk_residue(action: float, maslov: int, hbar: float) -> float:
    """Distance of |action|/(2πħ) − |m|/4 to the nearest integer."""

    value = abs(action) / (2.0 * math.pi * hbar) - abs(maslov) / 4.0
    return abs(value - round(value))


def ebk_check(
    manifold: LagrangianManifold,
    hbar: float,
    loops: Optional[Sequence[LoopClass]] = None,
    tol: Optional[float] = None,
) -> list[EBKReport]:
    """One report per loop (default: the generators of the manifold's loop group)."""

    if hbar <= 0:
        raise ValueError("hbar must be positive")
    tol = settings.TOL_EBK if tol is None else tol
    loops = LoopClass.generators(manifold) if loops is None else list(loops)

    reports = []
    for loop in loops:
        action = loop_period(manifold, loop)
        index = maslov_index(manifold, loop)
        residue = ebk_residue(action, index, hbar)
        reports.append(
            EBKReport(windings=loop.windings, action=action, maslov=index, residue=residue, quantized=residue <= tol)
        )
        logger.debug("semiclassical.ebk", windings=loop.windings, action=action, maslov=index, residue=residue)
    return reports


__all__ = ["EBKReport", "ebk_residue", "ebk_check"]
