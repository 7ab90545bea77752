# identify_schema.py
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.array_types import Matrix, Vector
from schemas.factorize_schema import NmfConfig, NmfResult, StrategyTag
from schemas.system_schema import SystemModel
from schemas.trace_schema import SteadyStateDataset, ThermalTrace


class OfflineResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: SystemModel
    nmf: NmfResult
    a_residual: float
    strategy: StrategyTag
    warnings: list[str] = Field(default_factory=list)


class PowerEstimate(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: Matrix
    per_sample_residual: Vector
    # row 0 of samples corresponds to trace sample `offset`
    offset: int = Field(1, ge=0)

    @model_validator(mode="after")
    def check_estimate(self):
        if self.samples.ndim != 2 or self.per_sample_residual.shape != (self.samples.shape[0],):
            raise ValueError("one residual per estimated sample is required")
        if np.any(self.samples < 0):
            raise ValueError("estimated power must be nonnegative")
        return self


class ErrorReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    percent: float
    per_unit: Vector
    excluded: int
    compared: int


class AEstimate(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Matrix
    residual: float
    warnings: list[str] = Field(default_factory=list)


class FitRequest(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    cooling: ThermalTrace
    dataset: SteadyStateDataset
    strategy: StrategyTag = "dbscan-icbpi"
    nmf: NmfConfig = NmfConfig()


class EstimateRequest(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    model: SystemModel
    trace: ThermalTrace
    totals: Vector
