# system_schema.py
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.array_types import Matrix

UnitClass = Literal["core", "big", "little", "gpu"]
FloorplanName = Literal["mesh2x2", "mesh2x4", "mesh4x4", "hetero6"]


class SystemModel(BaseModel):
    """Thermal state-space model: a (natural response), b (forced response), r (K/W)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    a: Matrix
    b: Matrix
    r: Matrix

    @model_validator(mode="after")
    def check_shapes(self):
        for name in ("a", "b", "r"):
            arr = getattr(self, name)
            if arr.shape != (self.n, self.n):
                raise ValueError(f"field '{name}' has shape {arr.shape}, expected ({self.n}, {self.n})")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"field '{name}' contains non-finite entries")
        return self


class Violation(BaseModel):
    invariant: str
    index: Optional[list[int]] = None
    detail: str


class Floorplan(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    n: int = Field(..., ge=1)
    rows: Optional[int] = Field(default=None, ge=1)
    cols: Optional[int] = Field(default=None, ge=1)
    adjacency: list[tuple[int, int]] = Field(default_factory=list)
    power_budget: float = Field(..., gt=0)
    unit_classes: list[UnitClass]

    @model_validator(mode="after")
    def check_layout(self):
        if (self.rows is None) != (self.cols is None):
            raise ValueError("rows and cols must be given together")
        if self.rows is not None and self.rows * self.cols != self.n:
            raise ValueError(f"{self.rows}x{self.cols} layout has {self.rows * self.cols} cells, n is {self.n}")
        if len(self.unit_classes) != self.n:
            raise ValueError(f"{len(self.unit_classes)} unit classes for {self.n} units")
        for i, j in self.adjacency:
            if i == j:
                raise ValueError(f"unit {i} is adjacent to itself")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"adjacency pair ({i}, {j}) outside [0, {self.n})")
        return self

    def adjacency_matrix(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.adjacency:
            adj[i, j] = adj[j, i] = True
        return adj


class GenerateModelRequest(BaseModel):
    floorplan: FloorplanName = "mesh2x2"
    seed: int = 0
