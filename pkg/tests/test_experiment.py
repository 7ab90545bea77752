import numpy as np
import pytest
from pydantic import ValidationError

from models.experiment_model import ExperimentModel
from schemas.experiment_schema import ExperimentConfig, WorkloadSuite

SUITE = WorkloadSuite(cooling_samples=120, runs=1, run_samples=40)


def _config(tmp_path, **overrides):
    fields = dict(floorplan="mesh2x2", seed=3, workload=SUITE, out_dir=tmp_path)
    fields.update(overrides)
    return ExperimentConfig(**fields)


def test_scenario_shapes(scenario, small_suite):
    assert scenario.cooling.k == small_suite.cooling_samples
    assert scenario.dataset.m == 4 * small_suite.repeats_for(4) + small_suite.outliers
    assert len(scenario.runs) == 1
    assert scenario.runs[0].thermal.k == small_suite.run_samples


def test_scenario_is_deterministic(small_suite):
    a = ExperimentModel.build_scenario("mesh2x2", 11, small_suite)
    b = ExperimentModel.build_scenario("mesh2x2", 11, small_suite)
    assert np.array_equal(a.model.r, b.model.r)
    assert np.array_equal(a.dataset.t_s, b.dataset.t_s)
    assert np.array_equal(a.runs[0].thermal.samples, b.runs[0].thermal.samples)


def test_runtime_realization_shares_the_model(small_suite):
    a = ExperimentModel.build_scenario("mesh2x2", 11, small_suite)
    b = ExperimentModel.build_scenario("mesh2x2", 11, small_suite, data_seed=1011)
    assert np.array_equal(a.model.a, b.model.a)
    assert not np.array_equal(a.dataset.t_s, b.dataset.t_s)


def test_run_task1_writes_tables(tmp_path):
    cfg = _config(tmp_path, strategies=["identity-bpi", "dbscan-icbpi"])
    report = ExperimentModel.run_task1(cfg)
    assert len(report.cells) == 2
    assert all(c.status == "ok" for c in report.cells)
    assert set(report.table["mesh2x2"]) == {"bpi", "icbpi"}
    assert (tmp_path / "task1_table.csv").exists()
    assert (tmp_path / "task1_cells.csv").exists()
    assert (tmp_path / "overlay_mesh2x2_icbpi_estimated.csv").exists()
    assert not (tmp_path / "task1_timings.csv").exists()


def test_run_task1_single_strategy(tmp_path):
    report = ExperimentModel.run_task1(_config(tmp_path, strategies=["dbscan-icbpi"], timings=True))
    assert list(report.table["mesh2x2"]) == ["icbpi"]
    assert report.mean_error("mesh2x2", "icbpi") >= 0
    assert (tmp_path / "task1_timings.csv").exists()


def test_run_task1_outputs_are_reproducible(tmp_path):
    cfg = dict(strategies=["identity-bpi", "dbscan-icbpi"])
    ExperimentModel.run_task1(_config(tmp_path / "a", **cfg))
    ExperimentModel.run_task1(_config(tmp_path / "b", **cfg))
    for name in ("task1_table.csv", "task1_cells.csv", "overlay_mesh2x2_bpi_actual.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_run_task2_small_grid(tmp_path):
    cfg = _config(tmp_path, strategies=["dbscan-icbpi"], xi_grid=[0.05], dt_grid=[-10.0, 0.0, 10.0])
    report = ExperimentModel.run_task2(cfg)
    assert (tmp_path / "sweep_mesh2x2_icbpi_s3.csv").exists()
    assert (tmp_path / "sweep_mesh2x2_icbpi_s3_detect.svg").exists()
    assert (tmp_path / "task2_table_mesh2x2.csv").exists()
    detect = report.rates["mesh2x2/icbpi_detect"]
    assert set(detect) >= {"-10", "10", "-15:-6", "6:15"}
    assert "0" not in detect


def test_run_task2_benign_only(tmp_path):
    cfg = _config(tmp_path, strategies=["dbscan-icbpi"], xi_grid=[0.05], dt_grid=[0.0])
    report = ExperimentModel.run_task2(cfg)
    assert report.rates == {}
    assert (tmp_path / "sweep_mesh2x2_icbpi_s3.csv").exists()
    assert not (tmp_path / "task2_table_mesh2x2.csv").exists()


def test_empty_grids_are_rejected(tmp_path):
    with pytest.raises(ValidationError):
        _config(tmp_path, dt_grid=[])
    with pytest.raises(ValidationError):
        _config(tmp_path, xi_grid=[])


def test_out_of_range_offset_is_rejected(tmp_path):
    with pytest.raises(ValidationError):
        _config(tmp_path, dt_grid=[20.0])


def test_duplicate_strategies_are_rejected(tmp_path):
    with pytest.raises(ValidationError):
        _config(tmp_path, strategies=["dbscan-icbpi", "dbscan-icbpi"])


@pytest.mark.slow
def test_strategy_ordering_across_floorplans(tmp_path):
    cfg = ExperimentConfig(
        floorplans=["mesh2x2", "mesh2x4", "mesh4x4", "hetero6"],
        seeds=10,
        strategies=["identity-bpi", "steady-state-bpiss", "dbscan-icbpi"],
        out_dir=tmp_path,
        workers=4,
    )
    table = ExperimentModel.run_task1(cfg).table
    for fp, row in table.items():
        assert row["icbpi"] < row["bpiss"] < row["bpi"], (fp, row)
    assert table["mesh2x2"]["icbpi"] <= 0.5 * table["mesh2x2"]["bpiss"]
