"""bpilab command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 on data or validation errors.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, get_args

import pandas as pd
from pydantic import ValidationError

from config import configure_logging, settings
from exceptions import BpiLabError, DataValidationError, ParseError, UsageError
from models.cluster_model import ClusterModel
from models.experiment_model import ExperimentModel
from models.identify_model import IdentifyModel
from models.report_model import ReportModel
from models.sentinel_model import SentinelModel
from models.simkit_model import SimkitModel
from models.storage_model import StorageModel
from models.validation_model import ValidationModel
from schemas.experiment_schema import ExperimentConfig
from schemas.factorize_schema import SHORT_NAMES, strategy_from_name
from schemas.sentinel_schema import GoldenReference, RuntimeData
from schemas.simkit_schema import AttackScenario
from schemas.system_schema import FloorplanName
from schemas.trace_schema import PowerTrace

logger = logging.getLogger(__name__)

FLOORPLANS = list(get_args(FloorplanName))


class BpiLabParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma-separated list of numbers")


def _strategy(text: str) -> str:
    try:
        return strategy_from_name(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def load_config(args) -> ExperimentConfig:
    """Config file first, then every flag the user actually gave."""
    doc = {}
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise DataValidationError(f"missing input: config {path} does not exist")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: line {e.lineno}: {e.msg}") from e
    overrides = {
        "seed": args.seed,
        "out_dir": args.out,
        "floorplan": getattr(args, "floorplan", None),
        "floorplans": getattr(args, "floorplans", None),
        "seeds": getattr(args, "seeds", None),
        "strategies": getattr(args, "strategy", None),
        "xi_grid": getattr(args, "xi_grid", None),
        "dt_grid": getattr(args, "dt_grid", None),
        "workers": getattr(args, "workers", None),
        "timings": getattr(args, "timings", None) or None,
    }
    doc.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig.model_validate(doc)
    except ValidationError as e:
        err = e.errors()[0]
        field = ".".join(str(p) for p in err["loc"])
        raise UsageError(f"invalid configuration: {field}: {err['msg']}") from e


def _out_dir(args) -> Path:
    return Path(args.out) if args.out is not None else settings.out_dir


def _out_file(args, default: str) -> Path:
    return Path(args.out) if args.out is not None else settings.out_dir / default


def cmd_gen_model(args) -> int:
    cfg = load_config(args)
    model = ExperimentModel.build_model(cfg.floorplan, cfg.seed)
    path = _out_file(args, "model.json")
    StorageModel.save_model(model, path)
    print(path)
    return 0


def cmd_gen_traces(args) -> int:
    cfg = load_config(args)
    scenario = ExperimentModel.build_scenario(cfg.floorplan, cfg.seed, cfg.workload)
    out = _out_dir(args)
    StorageModel.save_model(scenario.model, out / "model.json")
    StorageModel.save_thermal(scenario.cooling, out / "cooling.csv")
    StorageModel.save_steady(scenario.dataset, out / "steady.csv")
    StorageModel.save_truth(scenario.truth, out / "steady_truth.csv")
    for i, run in enumerate(scenario.runs):
        StorageModel.save_thermal(run.thermal, out / f"run{i}_thermal.csv")
        StorageModel.save_power(run.power, out / f"run{i}_power.csv")
    logger.info("gen-traces: %s seed %d written to %s", cfg.floorplan, cfg.seed, out)
    print(out)
    return 0


def cmd_inject(args) -> int:
    scenario = AttackScenario(sensor=args.sensor, dt_error=args.dt_error)
    path = _out_file(args, "attacked.csv")
    if args.steady:
        ds = StorageModel.load_steady(args.input, slack=args.slack)
        StorageModel.save_steady(SimkitModel.inject_attack_steady(ds, scenario), path)
    else:
        trace = StorageModel.load_thermal(args.input, slack=args.slack)
        StorageModel.save_thermal(SimkitModel.inject_attack(trace, scenario), path)
    print(path)
    return 0


def cmd_cluster(args) -> int:
    ds = StorageModel.load_steady(args.steady, slack=args.slack)
    hot = ClusterModel.hotspot_centroids(ds, ds.n)
    out = _out_dir(args)
    StorageModel.save_table(pd.DataFrame({
        "exp": range(ds.m),
        "label": hot.clusters.labels,
        "core": hot.clusters.core_flags.astype(int),
    }), out / "cluster_labels.csv")
    StorageModel.save_table(pd.DataFrame({
        "rank": range(hot.kdist.curve.shape[0]),
        "distance": hot.kdist.curve,
    }), out / "kdistance.csv")
    print(f"eps={hot.kdist.eps:.6g} clusters={hot.clusters.n_clusters} noise={int(hot.clusters.noise.sum())}")
    for msg in hot.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    return 0


def cmd_fit(args) -> int:
    cfg = load_config(args)
    cooling = StorageModel.load_thermal(args.cooling, slack=args.slack)
    ds = StorageModel.load_steady(args.steady, n=cooling.n, slack=args.slack)
    if args.strategy and len(args.strategy) > 1:
        raise UsageError(f"fit takes one --strategy, got {len(args.strategy)}")
    strategy = args.strategy[0] if args.strategy else "dbscan-icbpi"
    fit = IdentifyModel.fit_offline(cooling, ds, strategy, cfg.nmf)
    out = _out_dir(args)
    StorageModel.save_model(fit.model, out / "fitted_model.json")
    StorageModel.save_json(fit, out / "fit_diagnostics.json", exclude={"model"})
    golden = GoldenReference(r_golden=fit.model.r, model=fit.model, strategy=fit.strategy,
                             nmf=cfg.nmf, warnings=fit.warnings)
    StorageModel.save_json(golden, out / "golden.json")
    print(f"{SHORT_NAMES[fit.strategy]}: {fit.nmf.iterations_used} iterations, "
          f"objective {fit.nmf.objective_curve[-1]:.6g}")
    return 0


def cmd_estimate(args) -> int:
    model = StorageModel.load_model(args.model)
    # fitted models need not be stable or have a nonnegative B
    for v in ValidationModel.validate_model(model, require_stable=False):
        logger.warning("%s: %s", args.model, v.detail)
    trace = StorageModel.load_thermal(args.trace, n=model.n, slack=args.slack)
    power = StorageModel.load_power(args.power, n=model.n)
    est = IdentifyModel.estimate_power(model, trace, power.totals)
    path = _out_file(args, "power_estimate.csv")
    StorageModel.save_power(PowerTrace(n=model.n, samples=est.samples, totals=est.samples.sum(axis=1)),
                            path, start=est.offset)
    if not power.is_blind:
        report = IdentifyModel.avg_abs_error(est, power)
        print(f"average absolute error {report.percent:.4f}% ({report.excluded} samples excluded)")
    print(path)
    return 0


def _load_golden(path) -> GoldenReference:
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"missing input: {path} does not exist")
    try:
        return GoldenReference.model_validate_json(path.read_text())
    except ValidationError as e:
        raise DataValidationError(f"{path}: {e.errors()[0]['msg']}") from e


def _runtime(args, n: int) -> RuntimeData:
    cooling = StorageModel.load_thermal(args.cooling, n=n, slack=args.slack)
    ds = StorageModel.load_steady(args.steady, n=n, slack=args.slack)
    trace = totals = None
    if getattr(args, "trace", None) and getattr(args, "power", None):
        trace = StorageModel.load_thermal(args.trace, n=n, slack=args.slack)
        totals = StorageModel.load_power(args.power, n=n).totals
    return RuntimeData(cooling=cooling, dataset=ds, trace=trace, totals=totals)


def cmd_detect(args) -> int:
    golden = _load_golden(args.golden)
    report = SentinelModel.detect(golden, _runtime(args, golden.model.n), args.xi)
    path = _out_file(args, "detection.json")
    StorageModel.save_json(report, path)
    verdict = f"attack on sensor {report.suspect}" if report.attacked else "no attack"
    print(f"deviation {report.deviation:.6g} (xi {args.xi:g}): {verdict}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    if args.golden is None:
        report = ExperimentModel.run_task2(cfg)
        for msg in report.diagnostics:
            print(f"diagnostic: {msg}", file=sys.stderr)
        print("\n".join(report.files))
        return 0
    golden = _load_golden(args.golden)
    report = SentinelModel.sweep(golden, _runtime(args, golden.model.n), cfg.xi_grid, cfg.dt_grid, cfg.workers)
    out = _out_dir(args)
    stem = f"sweep_{SHORT_NAMES[golden.strategy]}"
    StorageModel.save_sweep(report, out / f"{stem}.csv")
    if any(not c.benign for c in report.cells):
        for which in ("detect", "ident"):
            ReportModel.heatmap(report, out / f"{stem}_{which}.svg", which)
    for msg in report.diagnostics:
        print(f"diagnostic: {msg}", file=sys.stderr)
    print(out / f"{stem}.csv")
    return 0


def cmd_compare_inits(args) -> int:
    report = ExperimentModel.run_task1(load_config(args))
    for fp, row in report.table.items():
        print(fp + ": " + ", ".join(f"{name} {value:.3f}%" for name, value in row.items()))
    return 0


def cmd_report(args) -> int:
    sweeps = {}
    for item in args.sweep:
        name, sep, path = item.partition("=")
        if not sep:
            raise UsageError(f"--sweep expects STRATEGY=PATH, got '{item}'")
        try:
            sweeps[strategy_from_name(name)] = Path(path)
        except ValueError as e:
            raise UsageError(str(e)) from e
    for path in ReportModel.render(sweeps, _out_dir(args), args.units):
        print(path)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from main import app

    uvicorn.run(app, host=args.host or settings.host, port=args.port or settings.port)
    return 0


def build_parser() -> BpiLabParser:
    common = BpiLabParser(add_help=False)
    common.add_argument("--seed", type=int, help="root seed; all randomness derives from it")
    common.add_argument("--out", help=f"output file or directory (default under $BPILAB_OUT, {settings.out_dir})")
    common.add_argument("--config", help="experiment configuration JSON")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")

    slack = BpiLabParser(add_help=False)
    slack.add_argument("--slack", type=float, default=15.5,
                       help="kelvin below ambient still accepted in runtime data (default 15.5)")

    parser = BpiLabParser(prog="bpilab", description="Blind power identification and thermal sensor attack toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=BpiLabParser)

    p = sub.add_parser("gen-model", parents=[common], help="synthesize a ground-truth thermal model")
    p.add_argument("--floorplan", choices=FLOORPLANS)
    p.set_defaults(func=cmd_gen_model)

    p = sub.add_parser("gen-traces", parents=[common], help="cooling, steady-state and workload traces")
    p.add_argument("--floorplan", choices=FLOORPLANS)
    p.set_defaults(func=cmd_gen_traces)

    p = sub.add_parser("inject", parents=[common, slack], help="add a constant offset to one sensor")
    p.add_argument("input", help="thermal CSV (or steady-state CSV with --steady)")
    p.add_argument("--sensor", type=int, required=True, help="0-based unit index")
    p.add_argument("--dt-error", type=float, required=True)
    p.add_argument("--steady", action="store_true")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("cluster", parents=[common, slack], help="DBSCAN hotspot clustering of steady-state data")
    p.add_argument("--steady", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("fit", parents=[common, slack], help="offline fit of A, B and R")
    p.add_argument("--cooling", required=True)
    p.add_argument("--steady", required=True)
    p.add_argument("--strategy", type=_strategy, action="append")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("estimate", parents=[common, slack], help="per-unit power from temperatures and total power")
    p.add_argument("--model", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--power", required=True, help="power CSV; blind (k,p_total) or with per-unit columns")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("detect", parents=[common, slack], help="compare runtime R against a golden reference")
    p.add_argument("--golden", required=True)
    p.add_argument("--cooling", required=True)
    p.add_argument("--steady", required=True)
    p.add_argument("--trace")
    p.add_argument("--power")
    p.add_argument("--xi", type=float, default=0.05)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep", parents=[common, slack],
                       help="(xi, dt) attack sweep; without --golden runs the full experiment")
    p.add_argument("--golden")
    p.add_argument("--cooling")
    p.add_argument("--steady")
    p.add_argument("--floorplan", choices=FLOORPLANS)
    p.add_argument("--floorplans", choices=FLOORPLANS, nargs="+")
    p.add_argument("--seeds", type=int)
    p.add_argument("--strategy", type=_strategy, action="append")
    p.add_argument("--xi-grid", type=_float_list)
    p.add_argument("--dt-grid", type=_float_list)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare-inits", parents=[common], help="power-estimation error per init strategy")
    p.add_argument("--floorplan", choices=FLOORPLANS)
    p.add_argument("--floorplans", choices=FLOORPLANS, nargs="+")
    p.add_argument("--seeds", type=int)
    p.add_argument("--strategy", type=_strategy, action="append")
    p.add_argument("--workers", type=int)
    p.add_argument("--timings", action="store_true", help="also write task1_timings.csv")
    p.set_defaults(func=cmd_compare_inits)

    p = sub.add_parser("report", parents=[common], help="heatmaps and comparison table from sweep CSVs")
    p.add_argument("--sweep", action="append", required=True, metavar="STRATEGY=PATH")
    p.add_argument("--units", type=int)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.log_level)
        if args.command == "sweep" and args.golden is not None and not (args.cooling and args.steady):
            raise UsageError("sweep with --golden needs --cooling and --steady")
        return args.func(args)
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0
    except BpiLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"error: {e.errors()[0]['msg']}", file=sys.stderr)
        return DataValidationError.exit_code


if __name__ == "__main__":
    sys.exit(main())
