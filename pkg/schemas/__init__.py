from .array_types import BoolVector, IntVector, Matrix, Vector
from .system_schema import Floorplan, FloorplanName, GenerateModelRequest, SystemModel, UnitClass, Violation
from .trace_schema import PowerTrace, SteadyStateDataset, SteadyStateTruth, ThermalTrace
from .simkit_schema import AttackRequest, AttackScenario, PowerRequest, SimulateRequest, WorkloadKind, WorkloadSpec
from .cluster_schema import NOISE, ClusterResult, DbscanParams, HotspotResult, KDistanceResult
from .factorize_schema import DEFAULT_STRATEGIES, SHORT_NAMES, InitStrategy, NmfConfig, NmfResult, StrategyTag
from .identify_schema import AEstimate, ErrorReport, EstimateRequest, FitRequest, OfflineResult, PowerEstimate
from .sentinel_schema import DetectionReport, DetectRequest, GoldenReference, RuntimeData, SweepCell, SweepReport
from .experiment_schema import (
    DEFAULT_DT_GRID, DEFAULT_XI_GRID, ExperimentConfig, ScenarioData,
    Task1Cell, Task1Report, Task2Report, WorkloadRun, WorkloadSuite
)

__all__ = [
    'Vector', 'Matrix', 'IntVector', 'BoolVector',
    'SystemModel', 'Violation', 'Floorplan', 'FloorplanName', 'UnitClass', 'GenerateModelRequest',
    'ThermalTrace', 'PowerTrace', 'SteadyStateDataset', 'SteadyStateTruth',
    'WorkloadKind', 'WorkloadSpec', 'AttackScenario', 'PowerRequest', 'SimulateRequest', 'AttackRequest',
    'NOISE', 'DbscanParams', 'ClusterResult', 'KDistanceResult', 'HotspotResult',
    'StrategyTag', 'DEFAULT_STRATEGIES', 'SHORT_NAMES', 'NmfConfig', 'InitStrategy', 'NmfResult',
    'OfflineResult', 'PowerEstimate', 'ErrorReport', 'AEstimate', 'FitRequest', 'EstimateRequest',
    'GoldenReference', 'RuntimeData', 'DetectionReport', 'SweepCell', 'SweepReport', 'DetectRequest',
    'DEFAULT_XI_GRID', 'DEFAULT_DT_GRID', 'WorkloadSuite', 'ExperimentConfig', 'WorkloadRun', 'ScenarioData',
    'Task1Cell', 'Task1Report', 'Task2Report',
]
