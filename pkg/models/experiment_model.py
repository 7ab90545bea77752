# experiment_model.py
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from config import settings
from exceptions import BpiLabError
from models.floorplan_model import FloorplanModel
from models.identify_model import IdentifyModel
from models.report_model import ReportModel
from models.sentinel_model import SentinelModel
from models.simkit_model import SimkitModel
from models.storage_model import StorageModel
from schemas.experiment_schema import (
    ExperimentConfig,
    ScenarioData,
    Task1Cell,
    Task1Report,
    Task2Report,
    WorkloadRun,
    WorkloadSuite,
)
from schemas.factorize_schema import SHORT_NAMES
from schemas.sentinel_schema import RuntimeData
from schemas.simkit_schema import WorkloadSpec
from schemas.system_schema import SystemModel
from schemas.trace_schema import PowerTrace

logger = logging.getLogger(__name__)

# runtime data is an independent realization of the calibrated system
RUNTIME_SEED_OFFSET = 1000


def _seeds(entropy, count: int) -> list[int]:
    """Independent child seeds derived from one user seed."""
    return [int(s) for s in np.random.SeedSequence(entropy).generate_state(count)]


def _task1_unit(args):
    fp_name, seed, cfg = args
    return ExperimentModel.task1_cells(fp_name, seed, cfg)


class ExperimentModel:
    @staticmethod
    def build_model(fp_name: str, seed: int) -> SystemModel:
        return SimkitModel.synth_model(FloorplanModel.get(fp_name), _seeds((seed, 0), 1)[0])

    @staticmethod
    def build_scenario(fp_name: str, seed: int, suite: Optional[WorkloadSuite] = None,
                       data_seed: Optional[int] = None, ambient: Optional[float] = None) -> ScenarioData:
        """Synthesizes a system from `seed` and its cooling, steady-state and run data from `data_seed`."""
        suite = suite or WorkloadSuite()
        ambient = settings.ambient if ambient is None else ambient
        fp = FloorplanModel.get(fp_name)
        model = ExperimentModel.build_model(fp_name, seed)
        data_seed = seed if data_seed is None else data_seed
        cool_seed, steady_seed, *run_seeds = _seeds((data_seed, 1), 2 + suite.runs)

        # cool down from the steady state of a random full-load operating point
        rng = np.random.default_rng(cool_seed)
        hot = rng.uniform(0.5, 0.9, size=fp.n) * fp.power_budget / fp.n
        cooling_power = SimkitModel.gen_power(fp, WorkloadSpec(
            kind="cooling", duration=suite.cooling_samples, budget=fp.power_budget, seed=cool_seed))
        cooling = SimkitModel.forward_sim(model, cooling_power, ambient + model.r @ hot, ambient)

        dataset, truth = SimkitModel.gen_steady_dataset(
            model, fp, fp.n * suite.repeats_for(fp.n), steady_seed,
            mixed=suite.mixed,
            outliers=suite.outliers,
            outlier_gain=suite.outlier_gain,
            sensor_noise=suite.sensor_noise,
        )

        runs = []
        for s in run_seeds:
            power = SimkitModel.gen_power(fp, WorkloadSpec(
                kind="random-walk", duration=suite.run_samples, budget=fp.power_budget, seed=s))
            t0 = ambient + model.r @ power.samples[0]
            runs.append(WorkloadRun(power=power, thermal=SimkitModel.forward_sim(model, power, t0, ambient)))
        return ScenarioData(model=model, cooling=cooling, dataset=dataset, truth=truth, runs=runs)

    @staticmethod
    def task1_cells(fp_name: str, seed: int, cfg: ExperimentConfig):
        """Fits every strategy on one scenario; returns (cells, overlays).

        overlays maps a strategy to the (estimated, actual) power of the first workload run.
        """
        scenario = ExperimentModel.build_scenario(fp_name, seed, cfg.workload)
        cells, overlays = [], {}
        for strategy in cfg.strategies:
            started = time.perf_counter()
            try:
                fit = IdentifyModel.fit_offline(scenario.cooling, scenario.dataset, strategy, cfg.nmf)
                errors, excluded = [], 0
                for i, run in enumerate(scenario.runs):
                    est = IdentifyModel.estimate_power(fit.model, run.thermal, run.power.totals)
                    report = IdentifyModel.avg_abs_error(est, run.power)
                    errors.append(report.percent)
                    excluded += report.excluded
                    if i == 0:
                        overlays[strategy] = (est, run.power)
                cells.append(Task1Cell(floorplan=fp_name, seed=seed, strategy=strategy,
                                       error_pct=float(np.mean(errors)), excluded=excluded,
                                       seconds=time.perf_counter() - started))
            except BpiLabError as e:
                logger.warning("task1 %s seed %d %s failed: %s", fp_name, seed, strategy, e)
                cells.append(Task1Cell(floorplan=fp_name, seed=seed, strategy=strategy,
                                       status=f"failed: {e}", seconds=time.perf_counter() - started))
        return cells, overlays

    @staticmethod
    def _write_overlays(out: Path, fp_name: str, overlays: dict) -> list[str]:
        files = []
        for strategy, (est, actual) in overlays.items():
            stem = out / f"overlay_{fp_name}_{SHORT_NAMES[strategy]}"
            estimated = PowerTrace(n=actual.n, samples=est.samples, totals=est.samples.sum(axis=1))
            window = actual.samples[est.offset:est.offset + est.samples.shape[0]]
            StorageModel.save_power(estimated, Path(f"{stem}_estimated.csv"), start=est.offset)
            StorageModel.save_power(PowerTrace(n=actual.n, samples=window, totals=window.sum(axis=1)),
                                    Path(f"{stem}_actual.csv"), start=est.offset)
            files += [f"{stem}_estimated.csv", f"{stem}_actual.csv"]
        return files

    @staticmethod
    def run_task1(cfg: ExperimentConfig) -> Task1Report:
        """Power-estimation error of every strategy on every floorplan and seed."""
        out = Path(cfg.out_dir)
        units = [(fp, seed, cfg) for fp in cfg.floorplan_list() for seed in cfg.seed_list()]
        logger.info("task1: %d scenarios x %d strategies, %d worker(s)", len(units), len(cfg.strategies), cfg.workers)
        if cfg.workers > 1 and len(units) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(_task1_unit, units))
        else:
            results = [_task1_unit(u) for u in units]

        cells, files = [], []
        for (fp_name, seed, _), (unit_cells, overlays) in zip(units, results):
            cells.extend(unit_cells)
            # overlays come from the first seed of each floorplan
            if seed == cfg.seed:
                files += ExperimentModel._write_overlays(out, fp_name, overlays)

        table = ReportModel.error_table(cells, cfg.strategies)
        StorageModel.save_table(table, out / "task1_table.csv")
        frame = pd.DataFrame([c.model_dump(exclude={"seconds"}) for c in cells])
        StorageModel.save_table(frame, out / "task1_cells.csv")
        files += [str(out / "task1_table.csv"), str(out / "task1_cells.csv")]
        if cfg.timings:
            timings = pd.DataFrame([c.model_dump(include={"floorplan", "seed", "strategy", "seconds"}) for c in cells])
            StorageModel.save_table(timings, out / "task1_timings.csv")
            files.append(str(out / "task1_timings.csv"))

        failed = sum(c.status != "ok" for c in cells)
        if failed:
            logger.warning("task1: %d of %d cells failed", failed, len(cells))
        summary = {
            row["floorplan"]: {SHORT_NAMES[s]: row[SHORT_NAMES[s]] for s in cfg.strategies}
            for row in table.to_dict("records")
        }
        return Task1Report(cells=cells, table=summary, files=files)

    @staticmethod
    def runtime_data(scenario: ScenarioData) -> RuntimeData:
        run = scenario.runs[0]
        return RuntimeData(cooling=scenario.cooling, dataset=scenario.dataset,
                           trace=run.thermal, totals=run.power.totals)

    @staticmethod
    def run_task2(cfg: ExperimentConfig) -> Task2Report:
        """Attack sweeps per floorplan, strategy and seed, with heatmaps and a comparison table."""
        out = Path(cfg.out_dir)
        files, diagnostics, rates = [], [], {}
        for fp_name in cfg.floorplan_list():
            reports = {s: [] for s in cfg.strategies}
            for seed in cfg.seed_list():
                calibration = ExperimentModel.build_scenario(fp_name, seed, cfg.workload)
                runtime = ExperimentModel.build_scenario(fp_name, seed, cfg.workload,
                                                         data_seed=seed + RUNTIME_SEED_OFFSET)
                data = ExperimentModel.runtime_data(runtime)
                for strategy in cfg.strategies:
                    golden = SentinelModel.build_golden(calibration.cooling, calibration.dataset, strategy, cfg.nmf)
                    report = SentinelModel.sweep(golden, data, cfg.xi_grid, cfg.dt_grid, cfg.workers)
                    reports[strategy].append(report)
                    diagnostics += [f"{fp_name} seed {seed} {SHORT_NAMES[strategy]}: {d}" for d in report.diagnostics]

                    stem = f"sweep_{fp_name}_{SHORT_NAMES[strategy]}_s{seed}"
                    StorageModel.save_sweep(report, out / f"{stem}.csv")
                    files.append(str(out / f"{stem}.csv"))
                    if any(not c.benign for c in report.cells):
                        for which in ("detect", "ident"):
                            files.append(str(ReportModel.heatmap(report, out / f"{stem}_{which}.svg", which)))

            if not any(d != 0 for d in cfg.dt_grid):
                logger.info("task2 %s: benign control grid only, no comparison table", fp_name)
                continue
            by_strategy = {SHORT_NAMES[s]: ReportModel.failure_rates(r) for s, r in reports.items()}
            table = ReportModel.comparison_table(by_strategy)
            StorageModel.save_table(table, out / f"task2_table_{fp_name}.csv")
            files.append(str(out / f"task2_table_{fp_name}.csv"))
            for name, frame in by_strategy.items():
                for kind in ("detect", "ident"):
                    rates[f"{fp_name}/{name}_{kind}"] = dict(zip(frame["dt"], frame[f"{kind}_pct"]))
        logger.info("task2: wrote %d files, %d diagnostics", len(files), len(diagnostics))
        return Task2Report(rates=rates, files=files, diagnostics=diagnostics)
