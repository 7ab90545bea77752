import numpy as np
import pytest

from exceptions import DataValidationError, ShapeError
from models.experiment_model import RUNTIME_SEED_OFFSET, ExperimentModel
from models.sentinel_model import SentinelModel
from models.simkit_model import SimkitModel
from schemas.experiment_schema import DEFAULT_DT_GRID, DEFAULT_XI_GRID, WorkloadSuite
from schemas.sentinel_schema import GoldenReference, RuntimeData
from schemas.simkit_schema import AttackScenario
from schemas.system_schema import SystemModel


@pytest.fixture(scope="module")
def golden(scenario):
    return SentinelModel.build_golden(scenario.cooling, scenario.dataset)


@pytest.fixture(scope="module")
def runtime(scenario):
    return ExperimentModel.runtime_data(scenario)


def _attacked(runtime, sensor, dt):
    s = AttackScenario(sensor=sensor, dt_error=dt)
    return RuntimeData(
        cooling=SimkitModel.inject_attack(runtime.cooling, s),
        dataset=SimkitModel.inject_attack_steady(runtime.dataset, s),
        trace=SimkitModel.inject_attack(runtime.trace, s),
        totals=runtime.totals,
    )


def _exact_golden(model: SystemModel) -> GoldenReference:
    return GoldenReference(r_golden=model.r, model=model, strategy="dbscan-icbpi")


def test_build_golden_is_deterministic(scenario, golden):
    again = SentinelModel.build_golden(scenario.cooling, scenario.dataset)
    assert np.array_equal(again.r_golden, golden.r_golden)


def test_build_golden_warns_on_drift(scenario, golden, runtime):
    attacked = _attacked(runtime, 0, 10.0)
    fresh = SentinelModel.build_golden(attacked.cooling, attacked.dataset, prior=golden)
    assert any("deviates" in w for w in fresh.warnings)


def test_clean_runtime_is_not_attacked(golden, runtime):
    report = SentinelModel.detect(golden, runtime)
    assert not report.attacked
    assert report.suspect is None
    assert report.t_hat is None
    assert report.deviation == pytest.approx(0.0, abs=1e-12)


def test_large_offset_is_detected(golden, runtime):
    report = SentinelModel.detect(golden, _attacked(runtime, 0, 10.0), xi=0.05)
    assert report.attacked
    assert report.suspect == 0
    assert report.t_hat.shape == (runtime.trace.k,)


def test_loose_tolerance_ignores_offset(golden, runtime):
    report = SentinelModel.detect(golden, _attacked(runtime, 0, 10.0), xi=10.0)
    assert not report.attacked
    assert report.per_unit_scores.shape == (4,)


def test_identify_suspect_on_perturbed_submatrix():
    model = SystemModel(n=3, a=np.eye(3) * 0.5, b=np.eye(3), r=np.eye(3) * 2 + 0.1)
    golden = _exact_golden(model)
    r_rt = golden.r_golden.copy()
    r_rt[2, :] *= 3.0
    r_rt[:, 2] += 1.0
    suspect, scores = SentinelModel.identify_suspect(golden, r_rt)
    assert suspect == 2
    assert scores[2] == 0.0
    assert scores[0] > 0 and scores[1] > 0


def test_identify_suspect_ties_pick_lowest_index():
    model = SystemModel(n=3, a=np.eye(3) * 0.5, b=np.eye(3), r=np.eye(3))
    suspect, scores = SentinelModel.identify_suspect(_exact_golden(model), np.eye(3))
    assert suspect == 0
    assert not scores.any()


def test_identify_suspect_needs_two_units(scalar_model):
    with pytest.raises(DataValidationError):
        SentinelModel.identify_suspect(_exact_golden(scalar_model), np.eye(1))


def test_identify_suspect_shape_mismatch(mesh_model):
    with pytest.raises(ShapeError):
        SentinelModel.identify_suspect(_exact_golden(mesh_model), np.eye(3))


def test_estimate_true_temp_matches_clean_reading(scenario):
    run = scenario.runs[0]
    t_hat = SentinelModel.estimate_true_temp(_exact_golden(scenario.model), run.thermal, run.power.totals, 1)
    np.testing.assert_allclose(t_hat, run.thermal.samples[:, 1], atol=1e-6)


def test_estimate_true_temp_undoes_offset(scenario):
    run = scenario.runs[0]
    attacked = SimkitModel.inject_attack(run.thermal, AttackScenario(sensor=2, dt_error=5.0))
    t_hat = SentinelModel.estimate_true_temp(_exact_golden(scenario.model), attacked, run.power.totals, 2)
    truth = run.thermal.samples[1:, 2]
    assert np.max(np.abs(t_hat[1:] - truth)) < np.max(np.abs(attacked.samples[1:, 2] - truth))


def test_estimate_true_temp_rejects_bad_suspect(scenario):
    run = scenario.runs[0]
    with pytest.raises(DataValidationError):
        SentinelModel.estimate_true_temp(_exact_golden(scenario.model), run.thermal, run.power.totals, 4)


def test_benign_sweep_row(golden, runtime):
    report = SentinelModel.sweep(golden, runtime, [0.05], [0.0])
    (cell,) = report.cells
    assert cell.benign
    assert cell.detection_failures == cell.trials == 4
    assert cell.identification_failures == 0
    assert cell.false_alarms == 0


def test_sweep_is_deterministic(golden, runtime):
    first = SentinelModel.sweep(golden, runtime, [0.05, 0.5], [-10.0, 10.0])
    second = SentinelModel.sweep(golden, runtime, [0.05, 0.5], [-10.0, 10.0])
    assert first.cells == second.cells
    assert len(first.cells) == 4
    assert all(c.trials == 4 for c in first.cells)


def test_sweep_rejects_empty_grid(golden, runtime):
    with pytest.raises(DataValidationError):
        SentinelModel.sweep(golden, runtime, [], [1.0])


@pytest.mark.slow
def test_hetero6_large_offsets_never_fail():
    suite = WorkloadSuite(runs=1, run_samples=20)
    calibration = ExperimentModel.build_scenario("hetero6", 0, suite)
    runtime = ExperimentModel.build_scenario("hetero6", 0, suite, data_seed=RUNTIME_SEED_OFFSET)
    golden = SentinelModel.build_golden(calibration.cooling, calibration.dataset)
    dt_grid = [d for d in DEFAULT_DT_GRID if abs(d) >= 6]
    report = SentinelModel.sweep(golden, ExperimentModel.runtime_data(runtime), DEFAULT_XI_GRID, dt_grid, workers=4)
    for cell in report.cells:
        assert cell.detection_failures == 0, cell
        assert cell.identification_failures == 0, cell


def test_infinite_tolerance_never_flags(golden, runtime):
    for dt in (-12.0, 3.0):
        report = SentinelModel.detect(golden, _attacked(runtime, 2, dt), xi=float("inf"))
        assert not report.attacked


def test_zero_tolerance_flags_any_perturbation(golden, runtime):
    for sensor, dt in ((0, 0.5), (3, -2.0)):
        assert SentinelModel.detect(golden, _attacked(runtime, sensor, dt), xi=0.0).attacked


def test_monotonicity_diagnostic_names_the_gap():
    # deviation of sensor 0 drops between dt 1 and dt 2
    outcome = {(1.0, 0): (0.2, 0), (2.0, 0): (0.01, 0), (3.0, 0): (0.3, 0)}
    found = SentinelModel._monotonicity(outcome, [0.05], [1.0, 2.0, 3.0], 1)
    assert found == ["xi 0.05, sensor 0: detected at dt 1 but not at 2"]


def test_monotone_outcome_has_no_diagnostics():
    outcome = {(-1.0, 0): (0.02, 0), (-2.0, 0): (0.06, 0), (1.0, 0): (0.03, 0), (2.0, 0): (0.2, 0)}
    assert SentinelModel._monotonicity(outcome, [0.01, 0.05, 0.1], [-2.0, -1.0, 1.0, 2.0], 1) == []


def _band_failures(report, limit=3):
    return sum(c.detection_failures + c.identification_failures
               for c in report.cells if not c.benign and abs(c.dt_error) <= limit)


@pytest.mark.slow
def test_identity_baseline_fails_more_in_small_offset_band():
    suite = WorkloadSuite(runs=1, run_samples=20)
    wins = 0
    for seed in range(10):
        calibration = ExperimentModel.build_scenario("hetero6", seed, suite)
        runtime = ExperimentModel.runtime_data(
            ExperimentModel.build_scenario("hetero6", seed, suite, data_seed=seed + RUNTIME_SEED_OFFSET))
        failures = {}
        for tag in ("identity-bpi", "dbscan-icbpi"):
            golden = SentinelModel.build_golden(calibration.cooling, calibration.dataset, tag)
            report = SentinelModel.sweep(golden, runtime, DEFAULT_XI_GRID, [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0],
                                         workers=4)
            failures[tag] = _band_failures(report)
        if failures["identity-bpi"] > failures["dbscan-icbpi"]:
            wins += 1
    assert wins >= 8
