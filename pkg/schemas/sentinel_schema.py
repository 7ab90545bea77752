# sentinel_schema.py
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.array_types import Matrix, Vector
from schemas.factorize_schema import NmfConfig, StrategyTag
from schemas.system_schema import SystemModel
from schemas.trace_schema import SteadyStateDataset, ThermalTrace


class GoldenReference(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r_golden: Matrix
    model: SystemModel
    strategy: StrategyTag
    nmf: NmfConfig = NmfConfig()
    warnings: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_golden(self):
        if np.any(self.r_golden < 0):
            raise ValueError("golden R must be nonnegative")
        if np.any(np.diag(self.r_golden) <= 0):
            raise ValueError("golden R must have a positive diagonal")
        return self


class RuntimeData(BaseModel):
    """Sensor data collected at runtime; any of it may carry an attack."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cooling: ThermalTrace
    dataset: SteadyStateDataset
    trace: Optional[ThermalTrace] = None
    totals: Optional[Vector] = None


class DetectionReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    attacked: bool
    deviation: float = Field(..., ge=0)
    suspect: Optional[int] = None
    t_hat: Optional[Vector] = None
    per_unit_scores: Vector
    r_runtime: Matrix

    @model_validator(mode="after")
    def check_suspect(self):
        if (self.suspect is None) == self.attacked:
            raise ValueError("a suspect is reported exactly when an attack is detected")
        return self


class SweepCell(BaseModel):
    model_config = ConfigDict(frozen=True)

    xi: float
    dt_error: float
    detection_failures: int = Field(..., ge=0)
    identification_failures: int = Field(..., ge=0)
    trials: int = Field(..., ge=1)
    benign: bool = False
    false_alarms: int = 0

    @model_validator(mode="after")
    def check_counts(self):
        if self.detection_failures + self.identification_failures > self.trials:
            raise ValueError("more failures than trials")
        return self


class SweepReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    strategy: StrategyTag
    n: int
    cells: list[SweepCell]
    diagnostics: list[str] = Field(default_factory=list)


class DetectRequest(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    golden: GoldenReference
    runtime: RuntimeData
    xi: float = Field(0.05, ge=0)
