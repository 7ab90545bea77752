# simkit_schema.py
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.array_types import Vector
from schemas.system_schema import FloorplanName, SystemModel
from schemas.trace_schema import PowerTrace, ThermalTrace

WorkloadKind = Literal["step-stress", "random-walk", "single-core-stress", "cooling"]


class WorkloadSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: WorkloadKind
    duration: int = Field(..., ge=2)
    budget: float = Field(..., gt=0)
    seed: int = 0
    core: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_core(self):
        if (self.kind == "single-core-stress") != (self.core is not None):
            raise ValueError("core is required for single-core-stress and only for it")
        return self


class AttackScenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    sensor: int = Field(..., ge=0)
    dt_error: float = 0.0
    xi: float = Field(0.05, ge=0)

    @property
    def benign(self) -> bool:
        return self.dt_error == 0


class PowerRequest(BaseModel):
    floorplan: FloorplanName = "mesh2x2"
    workload: WorkloadSpec


class SimulateRequest(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: SystemModel
    power: PowerTrace
    t0: Optional[Vector] = None
    ambient: Optional[float] = None


class AttackRequest(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    trace: ThermalTrace
    scenario: AttackScenario
