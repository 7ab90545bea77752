# sentinel_model.py
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from exceptions import DataValidationError, ShapeError
from models.identify_model import IdentifyModel
from models.simkit_model import SimkitModel
from models.solver_model import SolverModel
from schemas.factorize_schema import NmfConfig, StrategyTag
from schemas.sentinel_schema import DetectionReport, GoldenReference, RuntimeData, SweepCell, SweepReport
from schemas.simkit_schema import AttackScenario
from schemas.trace_schema import SteadyStateDataset, ThermalTrace

logger = logging.getLogger(__name__)

DEFAULT_XI = 0.05


def _attacked_fit(golden: GoldenReference, runtime: RuntimeData, sensor: int, dt_error: float):
    scenario = AttackScenario(sensor=sensor, dt_error=dt_error)
    cooling = SimkitModel.inject_attack(runtime.cooling, scenario)
    dataset = SimkitModel.inject_attack_steady(runtime.dataset, scenario)
    fit = IdentifyModel.fit_offline(cooling, dataset, golden.strategy, golden.nmf)
    deviation = SentinelModel.deviation(fit.model.r, golden.r_golden)
    suspect, _ = SentinelModel.identify_suspect(golden, fit.model.r)
    return deviation, suspect


def _attacked_fit_job(args):
    return _attacked_fit(*args)


class SentinelModel:
    @staticmethod
    def deviation(r_runtime: np.ndarray, r_golden: np.ndarray) -> float:
        """Relative Frobenius distance of a runtime R from the golden R."""
        norm = np.linalg.norm(r_golden)
        diff = float(np.linalg.norm(r_runtime - r_golden))
        return diff / norm if norm > 0 else diff

    @staticmethod
    def build_golden(cooling: ThermalTrace, ds: SteadyStateDataset, strategy: StrategyTag = "dbscan-icbpi",
                     cfg: Optional[NmfConfig] = None, prior: Optional[GoldenReference] = None,
                     xi: float = DEFAULT_XI) -> GoldenReference:
        """Fits R on calibrated (attack-free) data."""
        cfg = cfg or NmfConfig()
        fit = IdentifyModel.fit_offline(cooling, ds, strategy, cfg)
        warnings = list(fit.warnings)
        if prior is not None:
            dev = SentinelModel.deviation(fit.model.r, prior.r_golden)
            if dev > xi:
                msg = (f"calibration data deviates {dev:.3g} from the previous golden reference "
                       f"(xi {xi:g}); the data may not be attack-free")
                logger.warning(msg)
                warnings.append(msg)
        return GoldenReference(r_golden=fit.model.r, model=fit.model, strategy=strategy, nmf=cfg, warnings=warnings)

    @staticmethod
    def identify_suspect(golden: GoldenReference, r_runtime: np.ndarray):
        """Returns (suspect, scores): the unit whose row/column removal best restores agreement."""
        n = golden.r_golden.shape[0]
        if r_runtime.shape != (n, n):
            raise ShapeError(f"runtime R has shape {r_runtime.shape}, golden is ({n}, {n})")
        if n < 2:
            raise DataValidationError("a single sensor cannot be excluded")
        scores = np.empty(n)
        for i in range(n):
            rest = np.delete(np.arange(n), i)
            sub = np.ix_(rest, rest)
            scores[i] = SentinelModel.deviation(r_runtime[sub], golden.r_golden[sub])
        return int(np.argmin(scores)), scores

    @staticmethod
    def estimate_true_temp(golden: GoldenReference, trace: ThermalTrace, totals, suspect: int) -> np.ndarray:
        """Replaces the suspect sensor's readings with model-based estimates (kelvin).

        Power is re-estimated from the other sensors only; the suspect's series then follows
        its golden model rows, seeded with its first measured sample.
        """
        m = golden.model
        n = m.n
        if n < 2:
            raise DataValidationError("a single sensor cannot be excluded")
        if not 0 <= suspect < n:
            raise DataValidationError(f"suspect {suspect} outside [0, {n})")
        if trace.n != n:
            raise ShapeError(f"trace has {trace.n} units, golden model has {n}")
        totals = np.asarray(totals, dtype=float)
        if totals.shape != (trace.k,):
            raise ShapeError(f"{totals.size} totals for {trace.k} samples")

        rest = np.delete(np.arange(n), suspect)
        X = trace.rises().copy()
        for k in range(1, trace.k):
            forced = X[k] - m.a @ X[k - 1]
            p_hat = SolverModel.simplex_ls(m.b[rest], forced[rest], totals[k])
            X[k, suspect] = m.a[suspect] @ X[k - 1] + m.b[suspect] @ p_hat
        return X[:, suspect] + trace.ambient

    @staticmethod
    def detect(golden: GoldenReference, runtime: RuntimeData, xi: float = DEFAULT_XI) -> DetectionReport:
        fit = IdentifyModel.fit_offline(runtime.cooling, runtime.dataset, golden.strategy, golden.nmf)
        r_rt = fit.model.r
        dev = SentinelModel.deviation(r_rt, golden.r_golden)
        attacked = dev > xi
        suspect, scores = SentinelModel.identify_suspect(golden, r_rt)
        t_hat = None
        if attacked:
            logger.info("R deviation %.4g exceeds xi %g, suspect sensor %d", dev, xi, suspect)
            if runtime.trace is not None and runtime.totals is not None:
                t_hat = SentinelModel.estimate_true_temp(golden, runtime.trace, runtime.totals, suspect)
        return DetectionReport(
            attacked=attacked,
            deviation=dev,
            suspect=suspect if attacked else None,
            t_hat=t_hat,
            per_unit_scores=scores,
            r_runtime=r_rt,
        )

    @staticmethod
    def sweep(golden: GoldenReference, runtime: RuntimeData, xi_grid, dt_grid, workers: int = 1) -> SweepReport:
        """Attack every sensor with every offset and count BIC failures per (xi, dt) cell.

        One fit per (dt, sensor) is shared by the whole xi grid. dt = 0 cells are benign
        controls: their detection failures equal the sensor count by definition.
        """
        xi_grid, dt_grid = list(xi_grid), list(dt_grid)
        if not xi_grid or not dt_grid:
            raise DataValidationError("xi and dt grids must not be empty")
        n = golden.r_golden.shape[0]
        attacks = [d for d in dict.fromkeys(dt_grid) if d != 0]
        jobs = [(golden, runtime, s, d) for d in attacks for s in range(n)]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_attacked_fit_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
        else:
            results = [_attacked_fit(*job) for job in jobs]
        outcome = {(job[3], job[2]): res for job, res in zip(jobs, results)}

        benign_dev = None
        if 0 in dt_grid:
            clean = IdentifyModel.fit_offline(runtime.cooling, runtime.dataset, golden.strategy, golden.nmf)
            benign_dev = SentinelModel.deviation(clean.model.r, golden.r_golden)

        cells = []
        for xi in xi_grid:
            for d in dt_grid:
                if d == 0:
                    cells.append(SweepCell(xi=xi, dt_error=d, detection_failures=n, identification_failures=0,
                                           trials=n, benign=True, false_alarms=n if benign_dev > xi else 0))
                    continue
                missed = wrong = 0
                for s in range(n):
                    dev, suspect = outcome[(d, s)]
                    if dev <= xi:
                        missed += 1
                    elif suspect != s:
                        wrong += 1
                cells.append(SweepCell(xi=xi, dt_error=d, detection_failures=missed,
                                       identification_failures=wrong, trials=n))

        diagnostics = SentinelModel._monotonicity(outcome, xi_grid, attacks, n)
        for msg in diagnostics:
            logger.warning(msg)
        return SweepReport(strategy=golden.strategy, n=n, cells=cells, diagnostics=diagnostics)

    @staticmethod
    def _monotonicity(outcome: dict, xi_grid, attacks, n: int) -> list[str]:
        """Detection at |dt| = d should imply detection at d + 1 for the same sign, xi and sensor."""
        found = []
        for xi in xi_grid:
            for s in range(n):
                for d in attacks:
                    step = d + (1 if d > 0 else -1)
                    if (step, s) in outcome and outcome[(d, s)][0] > xi >= outcome[(step, s)][0]:
                        found.append(f"xi {xi:g}, sensor {s}: detected at dt {d:g} but not at {step:g}")
        return found
