# trace_schema.py
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.array_types import BoolVector, IntVector, Matrix, Vector


class ThermalTrace(BaseModel):
    """Absolute per-unit temperatures, one row per sample."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    dt: float = Field(0.1, gt=0)
    ambient: float = Field(298.15, gt=0)
    samples: Matrix
    # kelvin below ambient still accepted; widened by injected offsets
    slack: float = Field(0.5, ge=0)

    @model_validator(mode="after")
    def check_samples(self):
        if self.samples.ndim != 2 or self.samples.shape[1] != self.n:
            raise ValueError(f"samples have shape {self.samples.shape}, expected (K, {self.n})")
        if self.samples.shape[0] < 2:
            raise ValueError("a thermal trace needs at least 2 samples")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain non-finite temperatures")
        floor = self.ambient - self.slack
        if np.any(self.samples < floor):
            k, i = np.argwhere(self.samples < floor)[0]
            raise ValueError(f"sample {k}, unit {i}: {self.samples[k, i]} K is below ambient - slack ({floor} K)")
        return self

    @property
    def k(self) -> int:
        return self.samples.shape[0]

    def rises(self) -> np.ndarray:
        return self.samples - self.ambient


class PowerTrace(BaseModel):
    """Per-unit and total power; blind traces carry totals only (samples is None)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    samples: Optional[Matrix] = None
    totals: Vector

    @model_validator(mode="after")
    def check_power(self):
        if self.totals.ndim != 1:
            raise ValueError("totals must be a vector")
        if np.any(self.totals < 0):
            raise ValueError(f"negative total power at sample {int(np.argmax(self.totals < 0))}")
        if self.samples is None:
            return self
        if self.samples.shape != (self.totals.shape[0], self.n):
            raise ValueError(f"samples have shape {self.samples.shape}, expected ({self.totals.shape[0]}, {self.n})")
        if np.any(self.samples < 0):
            k, i = np.argwhere(self.samples < 0)[0]
            raise ValueError(f"negative power {self.samples[k, i]} W at sample {k}, unit {i}")
        if not np.allclose(self.samples.sum(axis=1), self.totals, rtol=1e-9, atol=1e-12):
            raise ValueError("totals do not match per-unit row sums")
        return self

    @property
    def k(self) -> int:
        return self.totals.shape[0]

    @property
    def is_blind(self) -> bool:
        return self.samples is None

    def blind(self) -> "PowerTrace":
        return PowerTrace(n=self.n, totals=self.totals)


class SteadyStateDataset(BaseModel):
    """Steady-state rises above ambient (one row per experiment) and total powers."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t_s: Matrix
    p_total: Vector
    # unit stressed by each experiment, -1 for mixed experiments
    stressed: Optional[IntVector] = None
    slack: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def check_dataset(self):
        if self.t_s.ndim != 2:
            raise ValueError("t_s must be a matrix")
        m, n = self.t_s.shape
        if n < 1 or m < n:
            raise ValueError(f"{m} experiments for {n} units; need at least as many experiments as units")
        if self.p_total.shape != (m,):
            raise ValueError(f"p_total has shape {self.p_total.shape}, expected ({m},)")
        if not np.all(np.isfinite(self.t_s)):
            raise ValueError("t_s contains non-finite rises")
        if np.any(self.t_s < -self.slack):
            j, i = np.argwhere(self.t_s < -self.slack)[0]
            raise ValueError(f"experiment {j}, unit {i}: negative rise {self.t_s[j, i]}")
        if np.any(self.p_total <= 0):
            raise ValueError(f"experiment {int(np.argmax(self.p_total <= 0))} has non-positive total power")
        if self.stressed is not None:
            if self.stressed.shape != (m,):
                raise ValueError(f"stressed has shape {self.stressed.shape}, expected ({m},)")
            if np.any((self.stressed < -1) | (self.stressed >= n)):
                raise ValueError("stressed labels must be -1 or a unit index")
        return self

    @property
    def n(self) -> int:
        return self.t_s.shape[1]

    @property
    def m(self) -> int:
        return self.t_s.shape[0]

    def normalized(self) -> np.ndarray:
        """Rises per watt of total power (K/W)."""
        return self.t_s / self.p_total[:, None]


class SteadyStateTruth(BaseModel):
    """Hidden per-unit powers of each experiment, kept for scoring only."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p_s: Matrix
    outliers: BoolVector
