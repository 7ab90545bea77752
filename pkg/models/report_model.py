# report_model.py
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from exceptions import DataValidationError  # noqa: E402
from models.storage_model import StorageModel  # noqa: E402
from schemas.experiment_schema import Task1Cell  # noqa: E402
from schemas.factorize_schema import SHORT_NAMES  # noqa: E402
from schemas.sentinel_schema import SweepReport  # noqa: E402

logger = logging.getLogger(__name__)

# inclusive |dt| bands of the comparison table
BANDS = [(-15, -6), (-5, -1), (1, 5), (6, 15)]

# fixed ids and no timestamp: identical runs give identical SVG bytes
plt.rcParams["svg.hashsalt"] = "bpilab"


def _dt_label(dt: float) -> str:
    return f"{dt:g}"


def _band_label(lo: int, hi: int) -> str:
    return f"{lo}:{hi}"


class ReportModel:
    @staticmethod
    def error_table(cells: list[Task1Cell], strategies: list[str]) -> pd.DataFrame:
        """Mean power-estimation error (%) per floorplan and strategy, failed cells ignored."""
        columns = ["floorplan"] + [SHORT_NAMES[s] for s in strategies]
        rows = []
        for fp in dict.fromkeys(c.floorplan for c in cells):
            row = {"floorplan": fp}
            for s in strategies:
                values = [c.error_pct for c in cells if c.floorplan == fp and c.strategy == s and c.status == "ok"]
                row[SHORT_NAMES[s]] = float(np.mean(values)) if values else float("nan")
            rows.append(row)
        return pd.DataFrame(rows, columns=columns)

    @staticmethod
    def failure_rates(reports: list[SweepReport]) -> pd.DataFrame:
        """Detection and identification failure rates (%) per dt and per band.

        A rate sums failures over the xi grid, every sensor and every report, divided by the
        matching trial count. Benign dt = 0 control cells are left out.
        """
        rows = [c for r in reports for c in r.cells if not c.benign]
        if not rows:
            raise DataValidationError("no attacked sweep cells to aggregate")
        frame = pd.DataFrame({
            "dt": [c.dt_error for c in rows],
            "detect": [c.detection_failures for c in rows],
            "ident": [c.identification_failures for c in rows],
            "trials": [c.trials for c in rows],
        })
        per_dt = frame.groupby("dt", sort=True)[["detect", "ident", "trials"]].sum()

        out = []
        for dt, row in per_dt.iterrows():
            out.append((_dt_label(dt), 100.0 * row.detect / row.trials, 100.0 * row.ident / row.trials))
        for lo, hi in BANDS:
            band = per_dt[(per_dt.index >= lo) & (per_dt.index <= hi)]
            if band.empty:
                continue
            trials = band["trials"].sum()
            out.append((_band_label(lo, hi), 100.0 * band["detect"].sum() / trials, 100.0 * band["ident"].sum() / trials))
        return pd.DataFrame(out, columns=["dt", "detect_pct", "ident_pct"])

    @staticmethod
    def comparison_table(rates: dict[str, pd.DataFrame]) -> pd.DataFrame:
        """Side-by-side failure rates, one detect/ident column pair per strategy."""
        table = None
        for name, frame in rates.items():
            cols = frame.rename(columns={"detect_pct": f"{name}_detect", "ident_pct": f"{name}_ident"})
            table = cols if table is None else table.merge(cols, on="dt", how="outer", sort=False)
        return table

    @staticmethod
    def heatmap(report: SweepReport, path: Path, which: str = "detect") -> Path:
        """Failure counts over the (dt, xi) grid as a static SVG."""
        if which not in ("detect", "ident"):
            raise DataValidationError(f"unknown heatmap kind '{which}'")
        xis = sorted({c.xi for c in report.cells})
        dts = sorted({c.dt_error for c in report.cells if not c.benign})
        if not dts:
            raise DataValidationError("sweep has no attacked cells to plot")
        grid = np.zeros((len(dts), len(xis)))
        for c in report.cells:
            if c.benign:
                continue
            value = c.detection_failures if which == "detect" else c.identification_failures
            grid[dts.index(c.dt_error), xis.index(c.xi)] = value

        fig, ax = plt.subplots(figsize=(6, 7))
        image = ax.imshow(grid, aspect="auto", origin="lower", cmap="viridis", vmin=0, vmax=report.n)
        ax.set_xticks(range(len(xis)), [f"{x:g}" for x in xis], rotation=90)
        ax.set_yticks(range(len(dts)), [_dt_label(d) for d in dts])
        ax.set_xlabel("xi")
        ax.set_ylabel("dt error (K)")
        kind = "detection" if which == "detect" else "identification"
        ax.set_title(f"{SHORT_NAMES.get(report.strategy, report.strategy)}: {kind} failures (of {report.n})")
        fig.colorbar(image, ax=ax)
        fig.tight_layout()

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        return path

    @staticmethod
    def render(sweeps: dict[str, Path], out_dir: Path, n=None) -> list[Path]:
        """Re-renders heatmaps and the comparison table from saved sweep CSVs.

        `sweeps` maps a strategy tag to its CSV.
        """
        out_dir = Path(out_dir)
        written, rates = [], {}
        for strategy, csv in sweeps.items():
            report = StorageModel.load_sweep(csv, strategy, n)
            stem = Path(csv).stem
            for which in ("detect", "ident"):
                written.append(ReportModel.heatmap(report, out_dir / f"{stem}_{which}.svg", which))
            rates[SHORT_NAMES.get(strategy, strategy)] = ReportModel.failure_rates([report])
        table_path = out_dir / "task2_table.csv"
        StorageModel.save_table(ReportModel.comparison_table(rates), table_path)
        written.append(table_path)
        logger.info("report: rendered %d files into %s", len(written), out_dir)
        return written
