from .scenario import (
    CurveModel,
    GridModel,
    HamiltonianModel,
    ManifoldModel,
    OutputModel,
    PacketModel,
    ParamsModel,
    PointModel,
    Scenario,
    ScenarioKind,
)

__all__ = [
    "CurveModel",
    "GridModel",
    "HamiltonianModel",
    "ManifoldModel",
    "OutputModel",
    "PacketModel",
    "ParamsModel",
    "PointModel",
    "Scenario",
    "ScenarioKind",
]
