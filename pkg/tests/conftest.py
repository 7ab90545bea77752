import numpy as np
import pytest

from models.experiment_model import ExperimentModel
from models.floorplan_model import FloorplanModel
from models.simkit_model import SimkitModel
from schemas.experiment_schema import WorkloadSuite
from schemas.system_schema import SystemModel
from schemas.trace_schema import ThermalTrace

AMBIENT = 298.15


@pytest.fixture
def scalar_model():
    return SystemModel(n=1, a=[[0.9]], b=[[0.1]], r=[[1.0]])


@pytest.fixture(scope="session")
def mesh2x2():
    return FloorplanModel.get("mesh2x2")


@pytest.fixture(scope="session")
def mesh_model(mesh2x2):
    return SimkitModel.synth_model(mesh2x2, 7)


@pytest.fixture(scope="session")
def small_suite():
    return WorkloadSuite(cooling_samples=120, runs=1, run_samples=60)


@pytest.fixture(scope="session")
def scenario(small_suite):
    return ExperimentModel.build_scenario("mesh2x2", 3, small_suite)


def cooling_trace(model: SystemModel, k: int = 200, seed: int = 0) -> ThermalTrace:
    """Zero-power decay from distinct initial rises."""
    rng = np.random.default_rng(seed)
    rises = np.empty((k, model.n))
    rises[0] = rng.uniform(5.0, 40.0, size=model.n)
    for i in range(1, k):
        rises[i] = model.a @ rises[i - 1]
    return ThermalTrace(n=model.n, samples=rises + AMBIENT, ambient=AMBIENT)
