import numpy as np
import pytest

from exceptions import DataValidationError, ShapeError
from models.experiment_model import ExperimentModel
from models.identify_model import IdentifyModel
from models.simkit_model import SimkitModel
from schemas.experiment_schema import WorkloadSuite
from schemas.identify_schema import PowerEstimate
from schemas.simkit_schema import WorkloadSpec
from schemas.system_schema import SystemModel
from schemas.trace_schema import PowerTrace, SteadyStateDataset, ThermalTrace
from tests.conftest import AMBIENT, cooling_trace


def test_estimate_a_diagonal():
    a = np.diag([0.9, 0.8])
    m = SystemModel(n=2, a=a, b=np.eye(2) - a, r=np.eye(2))
    est = IdentifyModel.estimate_A(cooling_trace(m, k=50))
    np.testing.assert_allclose(est.a, a, atol=1e-6)
    assert est.warnings == []


def test_estimate_a_four_units(mesh_model):
    est = IdentifyModel.estimate_A(cooling_trace(mesh_model, k=200, seed=1))
    assert np.linalg.norm(est.a - mesh_model.a) / np.linalg.norm(mesh_model.a) <= 1e-4
    assert est.residual < 1e-6


def test_estimate_a_without_excitation():
    trace = ThermalTrace(n=2, ambient=AMBIENT, samples=np.full((10, 2), AMBIENT))
    est = IdentifyModel.estimate_A(trace)
    assert not est.a.any()
    assert est.warnings


def test_estimate_a_needs_enough_samples(mesh_model):
    with pytest.raises(DataValidationError):
        IdentifyModel.estimate_A(cooling_trace(mesh_model, k=4))


def test_estimate_power_single_unit(scalar_model):
    trace = ThermalTrace(n=1, ambient=AMBIENT, samples=[[AMBIENT], [AMBIENT + 1], [AMBIENT + 1.5]])
    est = IdentifyModel.estimate_power(scalar_model, trace, [0.0, 3.0, 7.0])
    assert est.samples[:, 0].tolist() == [3.0, 7.0]
    assert est.offset == 1


def test_estimate_power_recovers_true_power(mesh_model, mesh2x2):
    power = SimkitModel.gen_power(mesh2x2, WorkloadSpec(kind="random-walk", duration=80, budget=80.0, seed=5))
    trace = SimkitModel.forward_sim(mesh_model, power, ambient=AMBIENT)
    est = IdentifyModel.estimate_power(mesh_model, trace, power.totals)
    np.testing.assert_allclose(est.samples, power.samples[1:], atol=1e-6)
    np.testing.assert_allclose(est.samples.sum(axis=1), power.totals[1:], rtol=1e-9)
    assert IdentifyModel.avg_abs_error(est, power).percent < 1e-4


def test_estimate_power_rejects_negative_totals(scalar_model):
    trace = ThermalTrace(n=1, ambient=AMBIENT, samples=[[AMBIENT], [AMBIENT + 1]])
    with pytest.raises(DataValidationError):
        IdentifyModel.estimate_power(scalar_model, trace, [1.0, -1.0])


def test_estimate_power_checks_total_count(scalar_model):
    trace = ThermalTrace(n=1, ambient=AMBIENT, samples=[[AMBIENT], [AMBIENT + 1]])
    with pytest.raises(ShapeError):
        IdentifyModel.estimate_power(scalar_model, trace, [1.0, 1.0, 1.0])


def _truth(values):
    values = np.asarray(values, dtype=float)
    return PowerTrace(n=values.shape[1], samples=values, totals=values.sum(axis=1))


def test_error_of_exact_estimate_is_zero():
    truth = _truth([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    est = PowerEstimate(samples=truth.samples[1:], per_sample_residual=np.zeros(2))
    assert IdentifyModel.avg_abs_error(est, truth).percent == 0.0


def test_error_single_unit_ten_percent():
    truth = _truth(np.full((4, 1), 10.0))
    est = PowerEstimate(samples=np.full((3, 1), 11.0), per_sample_residual=np.zeros(3))
    assert IdentifyModel.avg_abs_error(est, truth).percent == pytest.approx(10.0)


def test_error_of_scaled_estimate():
    rng = np.random.default_rng(0)
    truth = _truth(rng.uniform(1, 5, size=(6, 3)))
    est = PowerEstimate(samples=truth.samples[1:] * 1.05, per_sample_residual=np.zeros(5))
    assert IdentifyModel.avg_abs_error(est, truth).percent == pytest.approx(5.0)


def test_zero_actual_power_is_excluded():
    truth = _truth([[1.0, 1.0], [2.0, 0.0], [2.0, 4.0]])
    est = PowerEstimate(samples=[[2.0, 0.5], [2.0, 4.0]], per_sample_residual=np.zeros(2))
    report = IdentifyModel.avg_abs_error(est, truth)
    assert report.excluded == 1
    assert report.compared == 3
    assert report.percent == 0.0


def test_fit_offline_builds_consistent_model(scenario):
    fit = IdentifyModel.fit_offline(scenario.cooling, scenario.dataset, "dbscan-icbpi")
    m = fit.model
    assert np.array_equal(m.b, (np.eye(m.n) - m.a) @ m.r)
    assert m.a.min() >= 0 and m.r.min() >= 0
    assert fit.strategy == "dbscan-icbpi"
    assert fit.a_residual < 1e-6


def test_fit_offline_recovers_resistance():
    clean = ExperimentModel.build_scenario("mesh2x2", 3, WorkloadSuite(outliers=0, runs=1, run_samples=10))
    fit = IdentifyModel.fit_offline(clean.cooling, clean.dataset, "dbscan-icbpi")
    r = clean.model.r
    assert np.linalg.norm(fit.model.r - r) / np.linalg.norm(r) <= 0.05


def test_fit_offline_unit_mismatch(scenario, scalar_model):
    with pytest.raises(ShapeError):
        IdentifyModel.fit_offline(cooling_trace(scalar_model, k=10), scenario.dataset)


@pytest.mark.slow
def test_icbpi_beats_identity_init(mesh2x2):
    suite = WorkloadSuite(outliers=0, runs=1, run_samples=10)
    wins = 0
    for seed in range(10):
        sc = ExperimentModel.build_scenario("mesh2x2", seed, suite)
        errors = {}
        for tag in ("identity-bpi", "dbscan-icbpi"):
            fit = IdentifyModel.fit_offline(sc.cooling, sc.dataset, tag)
            errors[tag] = np.linalg.norm(fit.model.r - sc.model.r) / np.linalg.norm(sc.model.r)
        if errors["identity-bpi"] > errors["dbscan-icbpi"]:
            wins += 1
    assert wins >= 8


def _permuted(scenario, perm):
    inverse = np.argsort(perm)
    ds = scenario.dataset
    cooling = scenario.cooling.model_copy(update={"samples": scenario.cooling.samples[:, perm]})
    stressed = np.where(ds.stressed >= 0, inverse[np.maximum(ds.stressed, 0)], -1)
    dataset = SteadyStateDataset(t_s=ds.t_s[:, perm], p_total=ds.p_total, stressed=stressed)
    return cooling, dataset


def test_permuting_units_permutes_outputs(scenario):
    perm = np.array([2, 0, 3, 1])
    cooling, dataset = _permuted(scenario, perm)

    a = IdentifyModel.estimate_A(scenario.cooling).a
    np.testing.assert_allclose(IdentifyModel.estimate_A(cooling).a, a[np.ix_(perm, perm)], atol=1e-8)

    fit = IdentifyModel.fit_offline(scenario.cooling, scenario.dataset, "dbscan-icbpi")
    moved = IdentifyModel.fit_offline(cooling, dataset, "dbscan-icbpi")
    np.testing.assert_allclose(moved.model.r, fit.model.r[np.ix_(perm, perm)], rtol=1e-4, atol=1e-8)

    run = scenario.runs[0]
    model = scenario.model
    swapped = SystemModel(n=4, a=model.a[np.ix_(perm, perm)], b=model.b[np.ix_(perm, perm)],
                          r=model.r[np.ix_(perm, perm)])
    trace = run.thermal.model_copy(update={"samples": run.thermal.samples[:, perm]})
    est = IdentifyModel.estimate_power(model, run.thermal, run.power.totals)
    est_moved = IdentifyModel.estimate_power(swapped, trace, run.power.totals)
    np.testing.assert_allclose(est_moved.samples, est.samples[:, perm], atol=1e-8)
