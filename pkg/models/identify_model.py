# identify_model.py
import logging
import time

import numpy as np

from exceptions import DataValidationError, ShapeError
from models.factorize_model import FactorizeModel
from models.solver_model import SolverModel
from schemas.factorize_schema import InitStrategy, NmfConfig, StrategyTag
from schemas.identify_schema import AEstimate, ErrorReport, OfflineResult, PowerEstimate
from schemas.system_schema import SystemModel
from schemas.trace_schema import PowerTrace, SteadyStateDataset, ThermalTrace

logger = logging.getLogger(__name__)


class IdentifyModel:
    @staticmethod
    def estimate_A(cooling: ThermalTrace) -> AEstimate:
        """Row-wise NNLS fit of T2 = A T1 on a zero-power (cooling) trace."""
        n = cooling.n
        if cooling.k < n + 1:
            raise DataValidationError(f"cooling trace has {cooling.k} samples, need at least {n + 1}")
        X = cooling.rises()
        T1, T2 = X[:-1].T, X[1:].T
        warnings = []
        if np.linalg.matrix_rank(T1) < n:
            msg = "cooling trace does not excite every unit (rank-deficient), A is not unique"
            logger.warning(msg)
            warnings.append(msg)

        a = np.vstack([SolverModel.nnls(T1.T, T2[i]) for i in range(n)])
        norm = np.linalg.norm(T2)
        residual = float(np.linalg.norm(T2 - a @ T1) / norm) if norm > 0 else 0.0
        return AEstimate(a=a, residual=residual, warnings=warnings)

    @staticmethod
    def fit_offline(cooling: ThermalTrace, ds: SteadyStateDataset,
                    strategy: StrategyTag | InitStrategy = "dbscan-icbpi",
                    cfg: NmfConfig | None = None) -> OfflineResult:
        if cooling.n != ds.n:
            raise ShapeError(f"cooling trace has {cooling.n} units, dataset has {ds.n}")
        n = ds.n
        started = time.perf_counter()
        a_fit = IdentifyModel.estimate_A(cooling)
        init = strategy if isinstance(strategy, InitStrategy) else FactorizeModel.init_strategy(strategy, ds, n)
        fact = FactorizeModel.nmf(ds, init, cfg)
        a, r = a_fit.a, fact.r_hat
        model = SystemModel(n=n, a=a, b=(np.eye(n) - a) @ r, r=r)
        logger.info("fit_offline(%s): %d NMF iterations, objective %.4g, %.2fs",
                    init.tag, fact.iterations_used, fact.objective_curve[-1], time.perf_counter() - started)
        return OfflineResult(
            model=model,
            nmf=fact,
            a_residual=a_fit.residual,
            strategy=init.tag,
            warnings=a_fit.warnings + fact.warnings,
        )

    @staticmethod
    def estimate_power(model: SystemModel, t: ThermalTrace, totals) -> PowerEstimate:
        """Per-sample power from consecutive temperatures and the measured total power."""
        totals = np.asarray(totals, dtype=float)
        if t.n != model.n:
            raise ShapeError(f"trace has {t.n} units, model has {model.n}")
        if totals.shape != (t.k,):
            raise ShapeError(f"{totals.shape[0] if totals.ndim else 0} totals for {t.k} samples")
        if np.any(totals < 0):
            raise DataValidationError(f"negative total power at sample {int(np.argmax(totals < 0))}")

        X = t.rises()
        forced = X[1:] - X[:-1] @ model.a.T
        samples = np.array([SolverModel.simplex_ls(model.b, forced[k], totals[k + 1])
                            for k in range(t.k - 1)])
        residual = np.sum((samples @ model.b.T - forced) ** 2, axis=1)
        return PowerEstimate(samples=samples, per_sample_residual=residual, offset=1)

    @staticmethod
    def avg_abs_error(est: PowerEstimate, truth: PowerTrace) -> ErrorReport:
        """Mean over units of the mean relative error |est - actual| / actual, in percent."""
        if truth.is_blind:
            raise DataValidationError("scoring needs per-unit ground truth")
        actual = truth.samples[est.offset:est.offset + est.samples.shape[0]]
        if actual.shape != est.samples.shape:
            raise ShapeError(f"estimate {est.samples.shape} and truth {actual.shape} do not align")
        valid = actual > 0
        rel = np.zeros_like(actual)
        np.divide(np.abs(est.samples - actual), actual, out=rel, where=valid)
        counts = valid.sum(axis=0)
        per_unit = np.full(actual.shape[1], np.nan)
        seen = counts > 0
        per_unit[seen] = rel[:, seen].sum(axis=0) / counts[seen]
        excluded = int((~valid).sum())
        if excluded:
            logger.info("avg_abs_error: %d zero-power samples excluded", excluded)
        percent = float(np.mean(per_unit[seen]) * 100) if seen.any() else float("nan")
        return ErrorReport(percent=percent, per_unit=per_unit * 100, excluded=excluded, compared=int(valid.sum()))
