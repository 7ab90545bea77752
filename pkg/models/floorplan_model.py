# floorplan_model.py
import logging

import numpy as np
from scipy.sparse.csgraph import shortest_path

from exceptions import DataValidationError
from schemas.system_schema import Floorplan

logger = logging.getLogger(__name__)


class FloorplanModel:
    @staticmethod
    def mesh(rows: int, cols: int, budget: float, name: str | None = None, unit_classes=None) -> Floorplan:
        adjacency = []
        for r in range(rows):
            for c in range(cols):
                u = r * cols + c
                if c + 1 < cols:
                    adjacency.append((u, u + 1))
                if r + 1 < rows:
                    adjacency.append((u, u + cols))
        return Floorplan(
            name=name or f"mesh{rows}x{cols}",
            n=rows * cols,
            rows=rows,
            cols=cols,
            adjacency=adjacency,
            power_budget=budget,
            unit_classes=unit_classes or ["core"] * (rows * cols),
        )

    @staticmethod
    def catalog() -> dict[str, Floorplan]:
        """The four benchmark floorplans (1 cm² dies)."""
        return {
            "mesh2x2": FloorplanModel.mesh(2, 2, 80.0),
            "mesh2x4": FloorplanModel.mesh(2, 4, 80.0),
            "mesh4x4": FloorplanModel.mesh(4, 4, 80.0),
            # big.LITTLE + GPU approximated as a 2x3 grid
            "hetero6": FloorplanModel.mesh(
                2, 3, 15.0, name="hetero6",
                unit_classes=["little", "little", "big", "little", "little", "gpu"],
            ),
        }

    @staticmethod
    def get(name: str) -> Floorplan:
        plans = FloorplanModel.catalog()
        if name not in plans:
            raise DataValidationError(f"unknown floorplan '{name}', expected one of {', '.join(plans)}")
        return plans[name]

    @staticmethod
    def hop_distances(fp: Floorplan) -> np.ndarray:
        """Hop count between every pair of units; unreachable pairs get n."""
        hops = shortest_path(fp.adjacency_matrix().astype(float), unweighted=True, directed=False)
        hops[~np.isfinite(hops)] = fp.n
        return hops
