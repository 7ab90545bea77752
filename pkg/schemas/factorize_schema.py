# factorize_schema.py
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.array_types import BoolVector, Matrix, Vector

StrategyTag = Literal["identity-bpi", "steady-state-bpiss", "dbscan-icbpi", "fastica-bpi"]

DEFAULT_STRATEGIES: list[StrategyTag] = ["identity-bpi", "steady-state-bpiss", "dbscan-icbpi"]

SHORT_NAMES = {
    "identity-bpi": "bpi",
    "steady-state-bpiss": "bpiss",
    "dbscan-icbpi": "icbpi",
    "fastica-bpi": "ica",
}


def strategy_from_name(name: str) -> StrategyTag:
    """Accepts the full tag or its short name (bpi, bpiss, icbpi, ica)."""
    for tag, short in SHORT_NAMES.items():
        if name in (tag, short):
            return tag
    raise ValueError(f"unknown strategy '{name}'")


class NmfConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iters: int = Field(5000, ge=1)
    tol: float = Field(1e-9, gt=0)
    epsilon_floor: float = Field(1e-12, gt=0, le=1e-6)


class InitStrategy(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tag: StrategyTag
    r0: Matrix
    p0: Matrix
    # stressed-core statistics (bpiss), centroid rows (icbpi) or |mixing| (ica)
    payload: Optional[Matrix] = None
    # rows of the dataset handed to the factorization
    keep: Optional[BoolVector] = None
    warnings: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_payload(self):
        n = self.r0.shape[0]
        if self.r0.shape != (n, n) or self.p0.ndim != 2 or self.p0.shape[0] != n:
            raise ValueError(f"r0 {self.r0.shape} and p0 {self.p0.shape} do not describe {n} units")
        if self.tag == "identity-bpi":
            if self.payload is not None:
                raise ValueError("identity-bpi carries no payload")
        elif self.payload is None or self.payload.shape != (n, n):
            raise ValueError(f"{self.tag} needs an {n}x{n} payload")
        if self.keep is not None and self.keep.shape != (self.p0.shape[1],):
            raise ValueError("keep mask must have one entry per experiment")
        return self


class NmfResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r_hat: Matrix
    p_hat: Matrix
    objective_curve: Vector
    iterations_used: int
    converged: bool
    kept: BoolVector
    max_column_sum_error: float
    warnings: list[str] = Field(default_factory=list)
