# experiment_schema.py
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import settings
from schemas.factorize_schema import DEFAULT_STRATEGIES, NmfConfig, StrategyTag
from schemas.system_schema import FloorplanName, SystemModel
from schemas.trace_schema import PowerTrace, SteadyStateDataset, SteadyStateTruth, ThermalTrace

DEFAULT_XI_GRID = [round(0.01 * i, 2) for i in range(1, 11)]
DEFAULT_DT_GRID = [float(d) for d in range(-15, 0)] + [float(d) for d in range(1, 16)]
MAX_DT_ERROR = 15.0


class WorkloadSuite(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    cooling_samples: int = Field(200, ge=3)
    # single-core-stress experiments per unit (enough for a DBSCAN cluster); None means N + 3
    stress_repeats: Optional[int] = Field(default=None, ge=1)
    mixed: int = Field(0, ge=0)
    outliers: int = Field(3, ge=0)
    outlier_gain: float = Field(4.0, gt=1)
    sensor_noise: float = Field(0.0, ge=0)
    runs: int = Field(4, ge=1)
    run_samples: int = Field(300, ge=2)

    def repeats_for(self, n: int) -> int:
        return self.stress_repeats if self.stress_repeats is not None else n + 3


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    floorplan: FloorplanName = "mesh2x2"
    # task 1 compares across these; defaults to [floorplan]
    floorplans: Optional[list[FloorplanName]] = None
    seed: int = 0
    seeds: int = Field(1, ge=1)
    workload: WorkloadSuite = WorkloadSuite()
    nmf: NmfConfig = NmfConfig()
    strategies: list[StrategyTag] = Field(default_factory=lambda: list(DEFAULT_STRATEGIES))
    xi_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_XI_GRID))
    dt_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_DT_GRID))
    out_dir: Path = Field(default_factory=lambda: settings.out_dir)
    workers: int = Field(1, ge=1)
    timings: bool = False

    @field_validator("strategies")
    @classmethod
    def check_strategies(cls, value):
        if not value:
            raise ValueError("at least one strategy is required")
        if len(set(value)) != len(value):
            raise ValueError("strategies must not repeat")
        return value

    @field_validator("xi_grid")
    @classmethod
    def check_xi_grid(cls, value):
        if not value:
            raise ValueError("xi grid is empty")
        if any(not (0 <= xi <= 1) for xi in value):
            raise ValueError("xi values must lie in [0, 1]")
        return value

    @field_validator("dt_grid")
    @classmethod
    def check_dt_grid(cls, value):
        if not value:
            raise ValueError("dt grid is empty")
        if any(abs(dt) > MAX_DT_ERROR for dt in value):
            raise ValueError(f"dt values must lie in [-{MAX_DT_ERROR}, {MAX_DT_ERROR}]")
        return value

    @model_validator(mode="after")
    def check_floorplans(self):
        if self.floorplans is not None and not self.floorplans:
            raise ValueError("floorplans list is empty")
        return self

    def floorplan_list(self) -> list[str]:
        return list(self.floorplans) if self.floorplans else [self.floorplan]

    def seed_list(self) -> list[int]:
        return [self.seed + i for i in range(self.seeds)]


class WorkloadRun(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    power: PowerTrace
    thermal: ThermalTrace


class ScenarioData(BaseModel):
    """Everything a pipeline run sees, plus the hidden truth used to score it."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: SystemModel
    cooling: ThermalTrace
    dataset: SteadyStateDataset
    truth: SteadyStateTruth
    runs: list[WorkloadRun]


class Task1Cell(BaseModel):
    floorplan: str
    seed: int
    strategy: StrategyTag
    error_pct: float = float("nan")
    excluded: int = 0
    status: str = "ok"
    seconds: float = 0.0


class Task1Report(BaseModel):
    cells: list[Task1Cell]
    table: dict[str, dict[str, float]]
    files: list[str] = Field(default_factory=list)

    def mean_error(self, floorplan: str, strategy: str) -> float:
        return self.table[floorplan][strategy]


class Task2Report(BaseModel):
    rates: dict[str, dict[str, float]]
    files: list[str] = Field(default_factory=list)
    diagnostics: list[str] = Field(default_factory=list)
