# cluster_schema.py
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.array_types import BoolVector, IntVector, Matrix, Vector

NOISE = -1


class DbscanParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float = Field(..., gt=0)
    min_pts: int = Field(..., ge=2)


class ClusterResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    labels: IntVector
    centroids: Matrix
    core_flags: BoolVector

    @model_validator(mode="after")
    def check_labels(self):
        count = self.centroids.shape[0]
        if np.any((self.labels < NOISE) | (self.labels >= count)):
            raise ValueError(f"labels must be NOISE or in [0, {count})")
        for c in range(count):
            if not np.any(self.core_flags[self.labels == c]):
                raise ValueError(f"cluster {c} has no core point")
        return self

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]

    @property
    def noise(self) -> np.ndarray:
        return self.labels == NOISE


class KDistanceResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int
    eps: float
    elbow_index: int
    curve: Vector


class HotspotResult(BaseModel):
    """Centroid rows per unit plus the clustering that produced them."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    centroids: Matrix
    clusters: ClusterResult
    kdist: KDistanceResult
    min_pts: int
    # unit assigned to each cluster, -1 when a cluster maps to no unit
    assignment: list[int]
    keep: BoolVector
    degraded: list[int] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
