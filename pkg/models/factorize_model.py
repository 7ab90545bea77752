# factorize_model.py
import logging
import warnings as _warnings

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.decomposition import FastICA
from sklearn.exceptions import ConvergenceWarning

from exceptions import DataValidationError, ShapeError
from models.cluster_model import ClusterModel
from models.solver_model import SolverModel
from schemas.factorize_schema import InitStrategy, NmfConfig, NmfResult, StrategyTag
from schemas.trace_schema import SteadyStateDataset

logger = logging.getLogger(__name__)

EPS_INIT = 1e-12


def _ratio_split(ds: SteadyStateDataset) -> np.ndarray:
    """P0 column j: experiment j's rises rescaled to sum to its total power."""
    t_s = np.maximum(ds.t_s, 0.0)
    sums = t_s.sum(axis=1)
    share = np.where(sums[:, None] > 0, t_s / np.where(sums > 0, sums, 1.0)[:, None], 1.0 / ds.n)
    return (share * ds.p_total[:, None]).T


def _check_units(ds: SteadyStateDataset, n: int):
    if ds.n != n:
        raise ShapeError(f"dataset has {ds.n} units, expected {n}")


class FactorizeModel:
    @staticmethod
    def init_bpi(n: int, ds: SteadyStateDataset) -> InitStrategy:
        _check_units(ds, n)
        p0 = np.tile(ds.p_total / n, (n, 1))
        return InitStrategy(tag="identity-bpi", r0=np.eye(n), p0=p0)

    @staticmethod
    def init_bpiss(n: int, ds: SteadyStateDataset) -> InitStrategy:
        _check_units(ds, n)
        X = ds.normalized()
        r0 = np.empty((n, n))
        for j in range(n):
            rows = ds.stressed == j if ds.stressed is not None else np.zeros(ds.m, dtype=bool)
            if not rows.any():
                raise DataValidationError(f"no single-core-stress experiment for unit {j}")
            # column j: what stressing unit j does to every unit
            r0[:, j] = X[rows].mean(axis=0)
        r0 = np.maximum(r0, EPS_INIT)
        return InitStrategy(tag="steady-state-bpiss", r0=r0, p0=_ratio_split(ds), payload=r0)

    @staticmethod
    def init_icbpi(n: int, ds: SteadyStateDataset) -> InitStrategy:
        _check_units(ds, n)
        hot = ClusterModel.hotspot_centroids(ds, n)
        # a unit's centroid is its heating footprint, i.e. its column of R
        r0 = np.maximum(hot.centroids.T, EPS_INIT)
        keep = hot.keep
        warnings = list(hot.warnings)
        if keep.sum() < n:
            msg = f"only {int(keep.sum())} non-noise rows for {n} units, keeping every row"
            logger.warning(msg)
            warnings.append(msg)
            keep = np.ones(ds.m, dtype=bool)
        return InitStrategy(tag="dbscan-icbpi", r0=r0, p0=_ratio_split(ds), payload=hot.centroids,
                            keep=keep, warnings=warnings)

    @staticmethod
    def init_fastica(n: int, ds: SteadyStateDataset, seed: int = 0) -> InitStrategy:
        _check_units(ds, n)
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore", ConvergenceWarning)
            ica = FastICA(n_components=n, whiten="unit-variance", random_state=seed, max_iter=1000)
            ica.fit(ds.t_s)
        mixing = np.abs(ica.mixing_)
        # one component per unit, the one that loads most on it
        units, comps = linear_sum_assignment(mixing, maximize=True)
        r0 = mixing[:, comps[np.argsort(units)]]
        # scale so an even power split reproduces the mean observed rise
        mean_rise = ds.t_s.mean(axis=0)
        predicted = r0 @ np.full(n, ds.p_total.mean() / n)
        scale = np.linalg.norm(mean_rise) / max(np.linalg.norm(predicted), EPS_INIT)
        r0 = np.maximum(r0 * scale, EPS_INIT)
        return InitStrategy(tag="fastica-bpi", r0=r0, p0=_ratio_split(ds), payload=mixing)

    @staticmethod
    def init_strategy(tag: StrategyTag, ds: SteadyStateDataset, n: int | None = None) -> InitStrategy:
        n = ds.n if n is None else n
        builders = {
            "identity-bpi": FactorizeModel.init_bpi,
            "steady-state-bpiss": FactorizeModel.init_bpiss,
            "dbscan-icbpi": FactorizeModel.init_icbpi,
            "fastica-bpi": FactorizeModel.init_fastica,
        }
        if tag not in builders:
            raise DataValidationError(f"unknown strategy '{tag}'")
        return builders[tag](n, ds)

    @staticmethod
    def nmf(ds: SteadyStateDataset, init: InitStrategy, cfg: NmfConfig | None = None) -> NmfResult:
        """Factor T_s' ~ R P with P's columns pinned to the measured total powers.

        Each iteration updates P first, then R. The first P step solves every column exactly
        against R0, so a good initial R is refined rather than unmixed by a poor P0. Later
        P steps are projected gradient steps (step 1/L, L = largest eigenvalue of R'R) onto
        the scaled simplex; R takes Lee-Seung multiplicative updates. No step increases the
        objective.
        """
        cfg = cfg or NmfConfig()
        n, m = ds.n, ds.m
        if init.r0.shape != (n, n) or init.p0.shape != (n, m):
            raise ShapeError(f"init shapes {init.r0.shape}, {init.p0.shape} do not match {n} units, {m} experiments")
        eps = cfg.epsilon_floor
        warnings = list(init.warnings)

        T = ds.t_s.T.copy()
        if np.any(T <= 0):
            msg = f"{int((T <= 0).sum())} non-positive rises clamped to {eps:g}"
            logger.warning(msg)
            warnings.append(msg)
            T = np.maximum(T, eps)

        keep = init.keep if init.keep is not None else np.ones(m, dtype=bool)
        Tk = T[:, keep]
        totals = ds.p_total[keep]
        R = init.r0.copy()
        P = SolverModel.project_simplex(init.p0[:, keep], totals)

        def column_error(P):
            return float(np.max(np.abs(P.sum(axis=0) - totals) / totals))

        obj = float(np.linalg.norm(Tk - R @ P))
        curve = [obj]
        worst = column_error(P)
        floor = 1e-12 * max(1.0, float(np.linalg.norm(Tk)))
        converged = obj <= floor
        used = 0
        while not converged and used < cfg.max_iters:
            used += 1
            if used == 1:
                P = np.column_stack([SolverModel.simplex_ls(R, Tk[:, j], float(totals[j]))
                                     for j in range(Tk.shape[1])])
            else:
                gram = R.T @ R
                lipschitz = float(np.linalg.eigvalsh(gram)[-1])
                if lipschitz > 0:
                    P = SolverModel.project_simplex(P - (gram @ P - R.T @ Tk) / lipschitz, totals)
            worst = max(worst, column_error(P))
            R *= (Tk @ P.T) / (R @ (P @ P.T) + eps)
            new = float(np.linalg.norm(Tk - R @ P))
            curve.append(new)
            converged = new <= floor or (obj - new) < cfg.tol * obj
            obj = new

        p_hat = np.zeros((n, m))
        p_hat[:, keep] = P
        for j in np.flatnonzero(~keep):
            p_hat[:, j] = SolverModel.simplex_ls(R, T[:, j], float(ds.p_total[j]))
        logger.debug("nmf(%s): %d iterations, objective %.3g -> %.3g",
                     init.tag, used, curve[0], curve[-1])
        return NmfResult(
            r_hat=R,
            p_hat=p_hat,
            objective_curve=np.array(curve),
            iterations_used=used,
            converged=converged,
            kept=keep,
            max_column_sum_error=worst,
            warnings=warnings,
        )
