from .cluster_model import ClusterModel
from .experiment_model import ExperimentModel
from .factorize_model import FactorizeModel
from .floorplan_model import FloorplanModel
from .identify_model import IdentifyModel
from .report_model import ReportModel
from .sentinel_model import SentinelModel
from .simkit_model import SimkitModel
from .solver_model import SolverModel
from .storage_model import StorageModel
from .validation_model import ValidationModel

__all__ = [
    'StorageModel',
    'ValidationModel',
    'FloorplanModel',
    'SimkitModel',
    'ClusterModel',
    'SolverModel',
    'FactorizeModel',
    'IdentifyModel',
    'SentinelModel',
    'ExperimentModel',
    'ReportModel',
]
