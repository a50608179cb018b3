from __future__ import annotations

from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, model_validator


class ScenarioKind(str, Enum):
    CHECK = "check"
    FLOW = "flow"
    TRANSPORT = "transport"
    HJ = "hj"
    EBK = "ebk"
    WEYL = "weyl"
    INVARIANCE = "invariance"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CurveModel(StrictModel):
    type: Literal["circle", "segment", "expression"]
    n: PositiveInt = 1
    radius: PositiveFloat = 1.0
    center: Optional[List[float]] = None
    omega: float = 1.0
    start: Optional[List[float]] = None
    end: Optional[List[float]] = None
    duration: PositiveFloat = 1.0
    components: Optional[List[str]] = None

    @model_validator(mode="after")
    def _check_fields(self) -> "CurveModel":
        if self.type == "segment" and (self.start is None or self.end is None):
            raise ValueError("segment curves need 'start' and 'end'")
        if self.type == "expression" and not self.components:
            raise ValueError("expression curves need 'components'")
        return self


class ManifoldModel(StrictModel):
    type: Literal["circle", "torus", "quadratic_graph", "exact", "plane", "param"]
    n: PositiveInt = 1
    radius: PositiveFloat = 1.0
    radii: Optional[List[PositiveFloat]] = None
    base: Optional[List[float]] = None
    matrix: Optional[List[List[float]]] = None
    a: Optional[List[List[float]]] = None
    b: Optional[List[List[float]]] = None
    potential: Optional[str] = None
    embedding: Optional[List[str]] = None
    periodic: Optional[List[bool]] = None
    domain: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _check_fields(self) -> "ManifoldModel":
        required = {
            "torus": ("radii",),
            "quadratic_graph": ("matrix",),
            "exact": ("potential",),
            "plane": ("a", "b"),
            "param": ("embedding", "periodic"),
        }.get(self.type, ())
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.type} manifolds need {', '.join(repr(m) for m in missing)}")
        return self


class HamiltonianModel(StrictModel):
    type: Literal["free", "harmonic", "translation", "displacement", "quadratic", "anharmonic", "expression"]
    n: PositiveInt = 1
    mass: PositiveFloat = 1.0
    omega: PositiveFloat = 1.0
    quartic: float = 0.25
    z_a: Optional[List[float]] = None
    q: Optional[List[List[float]]] = None
    curve: Optional[CurveModel] = None
    expression: Optional[str] = None

    @model_validator(mode="after")
    def _check_fields(self) -> "HamiltonianModel":
        required = {
            "translation": "z_a",
            "displacement": "curve",
            "quadratic": "q",
            "expression": "expression",
        }.get(self.type)
        if required is not None and getattr(self, required) is None:
            raise ValueError(f"{self.type} Hamiltonians need {required!r}")
        return self


class PointModel(StrictModel):
    theta: List[float]
    windings: Optional[List[int]] = None


class GridModel(StrictModel):
    min: float
    max: float
    nodes: int = Field(101, ge=3)

    @model_validator(mode="after")
    def _check_bounds(self) -> "GridModel":
        if not self.max > self.min:
            raise ValueError("grid 'max' must exceed 'min'")
        return self


class PacketModel(StrictModel):
    x0: float = 0.0
    p0: float = 0.0
    width: PositiveFloat = 1.0


class ParamsModel(StrictModel):
    t0: float = 0.0
    t: Optional[float] = None
    times: Optional[List[float]] = None
    steps: Optional[PositiveInt] = None
    method: Optional[str] = None
    seed: Optional[int] = None
    hbar: PositiveFloat = 1.0
    loops: Optional[List[List[int]]] = None
    points: Optional[List[PointModel]] = None
    initial: Optional[List[List[float]]] = None
    grid: Optional[List[GridModel]] = None
    z_a: Optional[List[float]] = None
    z_b: Optional[List[float]] = None
    packet: PacketModel = Field(default_factory=PacketModel)
    interpolate: bool = False
    invariant: bool = False
    energy: Optional[float] = None
    curve: Optional[CurveModel] = None
    samples: PositiveInt = 65
    refinements: List[PositiveInt] = Field(default_factory=list)
    matrix: Optional[List[List[float]]] = None
    tolerances: Dict[str, PositiveFloat] = Field(default_factory=dict)


class OutputModel(StrictModel):
    prefix: str = Field("results", pattern=r"^[A-Za-z0-9_.-]+$")
    csv: bool = True
    json_: bool = Field(True, alias="json")

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


_REQUIREMENTS: Dict[ScenarioKind, tuple[str, ...]] = {
    ScenarioKind.CHECK: ("manifold",),
    ScenarioKind.FLOW: ("hamiltonian", "params.initial", "params.t"),
    ScenarioKind.TRANSPORT: ("hamiltonian", "manifold", "params.points"),
    ScenarioKind.HJ: ("hamiltonian", "manifold", "params.grid", "params.t"),
    ScenarioKind.EBK: ("manifold",),
    ScenarioKind.WEYL: ("params.grid", "params.z_a"),
    ScenarioKind.INVARIANCE: ("hamiltonian", "params.curve", "params.t"),
}


class Scenario(StrictModel):
    kind: ScenarioKind
    name: str = "scenario"
    description: Optional[str] = None
    manifold: Optional[ManifoldModel] = None
    hamiltonian: Optional[HamiltonianModel] = None
    params: ParamsModel = Field(default_factory=ParamsModel)
    output: OutputModel = Field(default_factory=OutputModel)

    @model_validator(mode="after")
    def _check_kind_requirements(self) -> "Scenario":
        for path in _REQUIREMENTS[self.kind]:
            owner, _, leaf = path.rpartition(".")
            holder = getattr(self, owner) if owner else self
            if getattr(holder, leaf or path) is None:
                raise ValueError(f"'{self.kind.value}' scenarios need '{path}'")
        if self.kind is ScenarioKind.TRANSPORT and self.params.t is None and not self.params.times:
            raise ValueError(f"'{self.kind.value}' scenarios need 'params.t' or 'params.times'")
        return self
