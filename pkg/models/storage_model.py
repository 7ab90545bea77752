# storage_model.py
import json
import logging
import re
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from config import settings
from exceptions import DataValidationError, ParseError, ShapeError
from schemas.sentinel_schema import SweepCell, SweepReport
from schemas.system_schema import SystemModel
from schemas.trace_schema import PowerTrace, SteadyStateDataset, SteadyStateTruth, ThermalTrace

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
FLOAT_FORMAT = "%.17g"
SWEEP_COLUMNS = ["xi", "dt", "sensor_trials", "detect_fail", "ident_fail"]


def _unit_columns(prefix: str, n: int) -> list[str]:
    return [f"{prefix}_{i}" for i in range(1, n + 1)]


def _count_units(path: Path, columns: list[str], prefix: str, n: Optional[int]) -> int:
    found = [c for c in columns if re.fullmatch(rf"{prefix}_\d+", c)]
    if found != _unit_columns(prefix, len(found)):
        raise ShapeError(f"{path}: unit columns {found} are not {prefix}_1..{prefix}_N in order")
    if n is not None and len(found) != n:
        raise ShapeError(f"{path}: header has {len(found)} unit columns, expected {n}")
    return len(found)


def _read_csv(path: Path, required: list[str]) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"missing input: {path} does not exist")
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(f"{path}: {e}") from e
    missing = [c for c in required if c not in raw.columns]
    if missing:
        raise ShapeError(f"{path}: missing column(s) {', '.join(missing)}")
    numeric = raw.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna()
    if bad.to_numpy().any():
        row, col = np.argwhere(bad.to_numpy())[0]
        # header is line 1
        raise ParseError(f"{path}: line {row + 2}, column '{raw.columns[col]}': "
                         f"'{raw.iat[row, col]}' is not a number")
    # float() parsing keeps %.17g values bit-exact
    return raw.astype(float)


def _build(cls, path: Path, **fields):
    try:
        return cls(**fields)
    except ValidationError as e:
        raise DataValidationError(f"{path}: {e.errors()[0]['msg']}") from e


def _write_csv(df: pd.DataFrame, path: Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


class StorageModel:
    @staticmethod
    def save_model(m: SystemModel, path: Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = {
            "format_version": FORMAT_VERSION,
            "n": m.n,
            "a": m.a.tolist(),
            "b": m.b.tolist(),
            "r": m.r.tolist(),
        }
        # json writes floats with repr(), which round-trips bit-exactly
        path.write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")

    @staticmethod
    def load_model(path: Path) -> SystemModel:
        path = Path(path)
        if not path.exists():
            raise DataValidationError(f"missing input: {path} does not exist")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: line {e.lineno}: {e.msg}") from e
        if not isinstance(doc, dict):
            raise ParseError(f"{path}: expected a JSON object")
        version = doc.get("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ParseError(f"{path}: field 'format_version' is {version!r}, expected {FORMAT_VERSION}")
        for name in ("n", "a", "b", "r"):
            if name not in doc:
                raise ParseError(f"{path}: missing field '{name}'")
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParseError(f"{path}: field 'n' must be a positive integer")
        arrays = {}
        for name in ("a", "b", "r"):
            try:
                arr = np.array(doc[name], dtype=float)
            except (TypeError, ValueError) as e:
                raise ShapeError(f"{path}: field '{name}' is not a rectangular numeric matrix") from e
            if arr.shape != (n, n):
                raise ShapeError(f"{path}: field '{name}' has shape {arr.shape}, expected ({n}, {n})")
            arrays[name] = arr
        return _build(SystemModel, path, n=n, **arrays)

    @staticmethod
    def save_thermal(t: ThermalTrace, path: Path):
        df = pd.DataFrame(t.samples, columns=_unit_columns("t", t.n))
        df.insert(0, "k", np.arange(t.k))
        _write_csv(df, path)

    @staticmethod
    def load_thermal(path: Path, n: Optional[int] = None, ambient: Optional[float] = None,
                     dt: Optional[float] = None, slack: float = 0.5) -> ThermalTrace:
        df = _read_csv(path, ["k"])
        units = _count_units(path, list(df.columns), "t", n)
        if units == 0:
            raise ShapeError(f"{path}: no t_i columns")
        return _build(
            ThermalTrace, path,
            n=units,
            dt=settings.dt if dt is None else dt,
            ambient=settings.ambient if ambient is None else ambient,
            samples=df[_unit_columns("t", units)].to_numpy(),
            slack=slack,
        )

    @staticmethod
    def save_power(p: PowerTrace, path: Path, start: int = 0):
        """`start` labels the first row, e.g. 1 for estimates that skip sample 0."""
        if p.is_blind:
            df = pd.DataFrame({"p_total": p.totals})
        else:
            df = pd.DataFrame(p.samples, columns=_unit_columns("p", p.n))
            df["p_total"] = p.totals
        df.insert(0, "k", np.arange(start, start + p.k))
        _write_csv(df, path)

    @staticmethod
    def load_power(path: Path, n: Optional[int] = None) -> PowerTrace:
        df = _read_csv(path, ["k", "p_total"])
        units = _count_units(path, list(df.columns), "p", None)
        totals = df["p_total"].to_numpy()
        if units == 0:
            if n is None:
                raise ShapeError(f"{path}: blind power trace needs the unit count")
            return _build(PowerTrace, path, n=n, totals=totals)
        if n is not None and units != n:
            raise ShapeError(f"{path}: header has {units} unit columns, expected {n}")
        return _build(PowerTrace, path, n=units, totals=totals,
                      samples=df[_unit_columns("p", units)].to_numpy())

    @staticmethod
    def save_steady(ds: SteadyStateDataset, path: Path):
        df = pd.DataFrame(ds.t_s, columns=_unit_columns("ts", ds.n))
        df.insert(0, "exp", np.arange(ds.m))
        df["p_total"] = ds.p_total
        if ds.stressed is not None:
            df["stressed"] = ds.stressed
        _write_csv(df, path)

    @staticmethod
    def load_steady(path: Path, n: Optional[int] = None, slack: float = 0.0) -> SteadyStateDataset:
        df = _read_csv(path, ["exp", "p_total"])
        units = _count_units(path, list(df.columns), "ts", n)
        if units == 0:
            raise ShapeError(f"{path}: no ts_i columns")
        stressed = df["stressed"].to_numpy().astype(int) if "stressed" in df.columns else None
        return _build(
            SteadyStateDataset, path,
            t_s=df[_unit_columns("ts", units)].to_numpy(),
            p_total=df["p_total"].to_numpy(),
            stressed=stressed,
            slack=slack,
        )

    @staticmethod
    def save_truth(truth: SteadyStateTruth, path: Path):
        df = pd.DataFrame(truth.p_s, columns=_unit_columns("p", truth.p_s.shape[1]))
        df.insert(0, "exp", np.arange(truth.p_s.shape[0]))
        df["outlier"] = truth.outliers.astype(int)
        _write_csv(df, path)

    @staticmethod
    def load_truth(path: Path) -> SteadyStateTruth:
        df = _read_csv(path, ["exp", "outlier"])
        units = _count_units(path, list(df.columns), "p", None)
        return _build(SteadyStateTruth, path,
                      p_s=df[_unit_columns("p", units)].to_numpy(),
                      outliers=df["outlier"].to_numpy().astype(bool))

    @staticmethod
    def save_sweep(report: SweepReport, path: Path):
        df = pd.DataFrame(
            [(c.xi, c.dt_error, c.trials, c.detection_failures, c.identification_failures) for c in report.cells],
            columns=SWEEP_COLUMNS,
        )
        _write_csv(df, path)

    @staticmethod
    def load_sweep(path: Path, strategy: str, n: Optional[int] = None) -> SweepReport:
        df = _read_csv(path, SWEEP_COLUMNS)
        cells = []
        for row in df.itertuples(index=False):
            trials = int(row.sensor_trials)
            cells.append(_build(
                SweepCell, path,
                xi=float(row.xi),
                dt_error=float(row.dt),
                trials=trials,
                detection_failures=int(row.detect_fail),
                identification_failures=int(row.ident_fail),
                benign=float(row.dt) == 0,
            ))
        units = n if n is not None else (cells[0].trials if cells else 1)
        return _build(SweepReport, path, strategy=strategy, n=units, cells=cells)

    @staticmethod
    def save_json(obj: BaseModel, path: Path, exclude: Optional[set] = None):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(obj.model_dump_json(indent=2, exclude=exclude) + "\n")

    @staticmethod
    def save_table(df: pd.DataFrame, path: Path):
        _write_csv(df, path)

    @staticmethod
    def load_table(path: Path, required: Optional[list[str]] = None) -> pd.DataFrame:
        path = Path(path)
        if not path.exists():
            raise DataValidationError(f"missing input: {path} does not exist")
        df = pd.read_csv(path)
        missing = [c for c in (required or []) if c not in df.columns]
        if missing:
            raise ShapeError(f"{path}: missing column(s) {', '.join(missing)}")
        return df
