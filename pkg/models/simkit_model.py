# simkit_model.py
import logging
from typing import Optional

import numpy as np

from config import settings
from exceptions import DataValidationError, ShapeError
from models.floorplan_model import FloorplanModel
from models.validation_model import ValidationModel
from schemas.simkit_schema import AttackScenario, WorkloadSpec
from schemas.system_schema import Floorplan, SystemModel
from schemas.trace_schema import PowerTrace, SteadyStateDataset, SteadyStateTruth, ThermalTrace

logger = logging.getLogger(__name__)

# self-resistance ranges (K/W) per unit class, all inside [0.8, 1.2]
CLASS_RESISTANCE = {
    "core": (0.8, 1.2),
    "big": (0.8, 0.95),
    "little": (1.0, 1.2),
    "gpu": (0.85, 1.0),
}
NEIGHBOR_COUPLING = (0.1, 0.3)
HOP_DECAY = 0.25
SPECTRAL_RADIUS = (0.85, 0.99)
IDLE_FRACTION = (0.01, 0.02)
# total power of a stressed experiment as a fraction of the budget
STRESS_SHARE = (0.85, 1.0)


def _idle_floor(rng: np.random.Generator, fp: Floorplan) -> np.ndarray:
    """Per-unit leakage, 1-2% of each unit's share of the budget."""
    return rng.uniform(*IDLE_FRACTION, size=fp.n) * fp.power_budget / fp.n


class SimkitModel:
    @staticmethod
    def synth_model(fp: Floorplan, seed: int) -> SystemModel:
        if fp.n < 1:
            raise DataValidationError("floorplan has no units")
        rng = np.random.default_rng(seed)
        n = fp.n

        diag = np.array([rng.uniform(*CLASS_RESISTANCE[c]) for c in fp.unit_classes])
        hops = FloorplanModel.hop_distances(fp)
        coupling = rng.uniform(*NEIGHBOR_COUPLING, size=(n, n))
        coupling = np.triu(coupling, 1)
        coupling = coupling + coupling.T
        off = coupling * np.sqrt(np.outer(diag, diag)) * HOP_DECAY ** np.maximum(hops - 1, 0)
        np.fill_diagonal(off, 0.0)
        # keep R well conditioned: shrink coupling until it is clearly positive definite
        while n > 1 and np.linalg.eigvalsh(np.diag(diag) + off).min() < 0.25 * diag.min():
            off *= 0.9
        r = np.diag(diag) + off

        rho = rng.uniform(*SPECTRAL_RADIUS)
        a_diag = rho * rng.uniform(0.9, 1.0, size=n)
        adj = fp.adjacency_matrix().astype(float)
        kappa = 0.02
        while True:
            a = np.diag(a_diag) + kappa * adj
            a *= rho / ValidationModel.spectral_radius(a)
            b = (np.eye(n) - a) @ r
            if np.all(b >= 0) or kappa == 0.0:
                break
            kappa = kappa / 2 if kappa > 1e-6 else 0.0

        m = SystemModel(n=n, a=a, b=b, r=r)
        violations = ValidationModel.validate_model(m)
        if violations:
            raise DataValidationError(f"synthesized model is invalid: {violations[0].detail}")
        logger.debug("synthesized %s model (seed %s, coupling %.3g)", fp.name, seed, kappa)
        return m

    @staticmethod
    def gen_power(fp: Floorplan, spec: WorkloadSpec) -> PowerTrace:
        rng = np.random.default_rng(spec.seed)
        n, k = fp.n, spec.duration
        share = spec.budget / n

        if spec.kind == "cooling":
            samples = np.zeros((k, n))
        elif spec.kind == "single-core-stress":
            if spec.core >= n:
                raise DataValidationError(f"core {spec.core} outside [0, {n})")
            idle = rng.uniform(*IDLE_FRACTION, size=n) * share
            idle[spec.core] = 0.0
            total = rng.uniform(*STRESS_SHARE) * spec.budget
            samples = np.tile(idle, (k, 1))
            samples[:, spec.core] = total - idle.sum()
        elif spec.kind == "step-stress":
            idle = rng.uniform(*IDLE_FRACTION, size=n) * share
            levels = rng.uniform(0.3, 1.0, size=n) * 0.9 * share
            samples = np.tile(idle, (k, 1))
            samples[k // 4:] = np.maximum(levels, idle)
        else:
            # bounded random walk of per-unit utilisation
            steps = rng.normal(0.0, 0.05, size=(k, n))
            util = np.empty((k, n))
            util[0] = rng.uniform(0.3, 1.0, size=n)
            for i in range(1, k):
                util[i] = np.clip(util[i - 1] + steps[i], 0.2, 1.0)
            samples = util * 0.9 * share
        return PowerTrace(n=n, samples=samples, totals=samples.sum(axis=1))

    @staticmethod
    def forward_sim(m: SystemModel, p: PowerTrace, t0: Optional[np.ndarray] = None,
                    ambient: Optional[float] = None, dt: Optional[float] = None) -> ThermalTrace:
        """Iterates T(k) = A T(k-1) + B P(k) on rises; row 0 is t0 and P(0) is unused."""
        ambient = settings.ambient if ambient is None else ambient
        if p.is_blind:
            raise DataValidationError("forward simulation needs per-unit power")
        if p.n != m.n:
            raise ShapeError(f"power trace has {p.n} units, model has {m.n}")
        t0 = np.full(m.n, ambient) if t0 is None else np.asarray(t0, dtype=float)
        if t0.shape != (m.n,):
            raise ShapeError(f"t0 has shape {t0.shape}, expected ({m.n},)")
        if np.any(t0 < ambient):
            raise DataValidationError("initial temperatures must not be below ambient")

        rises = np.empty((p.k, m.n))
        rises[0] = t0 - ambient
        for k in range(1, p.k):
            rises[k] = m.a @ rises[k - 1] + m.b @ p.samples[k]
        return ThermalTrace(
            n=m.n,
            dt=settings.dt if dt is None else dt,
            ambient=ambient,
            samples=rises + ambient,
        )

    @staticmethod
    def gen_steady_dataset(m: SystemModel, fp: Floorplan, experiments: int, seed: int,
                           mixed: int = 0, outliers: int = 0, outlier_gain: float = 10.0,
                           sensor_noise: float = 0.0, idle: bool = True):
        """Steady-state experiments; returns (dataset, hidden truth).

        Experiment j stresses unit j mod N, so the first N experiments cover every unit once.
        Mixed experiments split the stress over two units and are labelled -1. Outlier rows
        are copies of earlier experiments with their rises multiplied by outlier_gain.
        """
        n = m.n
        if fp.n != n:
            raise ShapeError(f"floorplan has {fp.n} units, model has {n}")
        if experiments < n:
            raise DataValidationError(f"{experiments} experiments for {n} units; need at least {n}")
        rng = np.random.default_rng(seed)
        floor = _idle_floor(rng, fp) if idle else np.zeros(n)

        powers, labels = [], []
        for j in range(experiments + mixed):
            p = floor.copy()
            total = rng.uniform(*STRESS_SHARE) * fp.power_budget
            if j < experiments:
                unit = j % n
                p[unit] = 0.0
                p[unit] = total - p.sum()
                labels.append(unit)
            else:
                pair = rng.choice(n, size=2, replace=False) if n > 1 else np.array([0, 0])
                p[pair] = 0.0
                split = rng.uniform(0.3, 0.7)
                rest = total - p.sum()
                p[pair[0]] += split * rest
                p[pair[1]] += (1 - split) * rest
                labels.append(-1)
            powers.append(p)
        p_s = np.array(powers)
        t_s = p_s @ m.r.T

        flags = np.zeros(len(powers), dtype=bool)
        if outliers:
            source = rng.choice(len(powers), size=outliers, replace=True)
            t_s = np.vstack([t_s, t_s[source] * outlier_gain])
            p_s = np.vstack([p_s, p_s[source]])
            labels.extend(labels[i] for i in source)
            flags = np.concatenate([flags, np.ones(outliers, dtype=bool)])
        if sensor_noise > 0:
            t_s = np.maximum(t_s + rng.normal(0.0, sensor_noise, size=t_s.shape), 0.0)

        ds = SteadyStateDataset(t_s=t_s, p_total=p_s.sum(axis=1), stressed=np.array(labels))
        return ds, SteadyStateTruth(p_s=p_s, outliers=flags)

    @staticmethod
    def inject_attack(t: ThermalTrace, s: AttackScenario) -> ThermalTrace:
        if s.sensor >= t.n:
            raise DataValidationError(f"sensor {s.sensor} outside [0, {t.n})")
        if s.benign:
            return t
        samples = t.samples.copy()
        samples[:, s.sensor] += s.dt_error
        return t.model_copy(update={
            "samples": SimkitModel._frozen(samples),
            "slack": t.slack + abs(s.dt_error),
        })

    @staticmethod
    def inject_attack_steady(ds: SteadyStateDataset, s: AttackScenario) -> SteadyStateDataset:
        """Same offset applied to the steady-state rises read through the sensor."""
        if s.sensor >= ds.n:
            raise DataValidationError(f"sensor {s.sensor} outside [0, {ds.n})")
        if s.benign:
            return ds
        t_s = ds.t_s.copy()
        t_s[:, s.sensor] += s.dt_error
        return ds.model_copy(update={
            "t_s": SimkitModel._frozen(t_s),
            "slack": ds.slack + abs(s.dt_error),
        })

    @staticmethod
    def _frozen(arr: np.ndarray) -> np.ndarray:
        arr.setflags(write=False)
        return arr
