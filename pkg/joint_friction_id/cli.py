"""命令行入口

    python -m joint_friction_id run-all --fixture ankle --seed 7 --out runs/demo

Every subcommand reads and writes artifacts inside one run directory:
raw/, dataset/, fit/, pinn/, sweep/, eval/ and report/.
"""
import argparse
import logging
import os
import sys

from joint_friction_id import constant
from joint_friction_id.config.experiment import ExperimentConfig
from joint_friction_id.config.experiment import load_config
from joint_friction_id.config.validation import ConfigError
from joint_friction_id.control.closed_loop import ExperimentTrace
from joint_friction_id.control.compensator import CompensatorHandle
from joint_friction_id.evaluation import report
from joint_friction_id.evaluation.protocols import ExperimentReport
from joint_friction_id.evaluation.protocols import run_evaluation
from joint_friction_id.excitation import trajectory
from joint_friction_id.fitting.static_fit import FitResult
from joint_friction_id.fitting.static_fit import fit_static_model
from joint_friction_id.friction.ttypes import ModelKind
from joint_friction_id.friction.ttypes import name_of
from joint_friction_id.friction.ttypes import value_of
from joint_friction_id.io import json_io
from joint_friction_id.pinn import search
from joint_friction_id.pinn import training
from joint_friction_id.pinn.network import PinnConfig
from joint_friction_id.pinn.network import PinnModel
from joint_friction_id.sigproc.dataset import Dataset
from joint_friction_id.sigproc.pipeline import run_pipeline_batch
from joint_friction_id.sim.batch import simulate_batch
from joint_friction_id.sim.jointsim import RawLog
from joint_friction_id.util import run_dir as run_dir_util
from joint_friction_id.util.logger import create_logger
from joint_friction_id.util.metric import stage_timer

RAW_DIR = "raw"
DATASET_DIR = "dataset"
FIT_DIR = "fit"
EVAL_DIR = "eval"
REPORT_DIR = "report"

MANIFEST_FILE = "raw/manifest.json"
PINN_MODEL_FILE = "pinn/model.json"
PINN_CURVES_FILE = "pinn/curves.csv"
TRIALS_FILE = "sweep/trials.csv"
BEST_CONFIG_FILE = "sweep/best_config.json"
REPORTS_FILE = "eval/reports.json"
FIT_KINDS = ("cv", "scv", "all")


def _fit_path(kind):
    return "{}/{}.json".format(FIT_DIR, name_of(ModelKind, kind).lower())


def _traj_name(k):
    return "traj_{:03d}.csv".format(k)


def cmd_simulate(config: ExperimentConfig, run_dir):
    fixture = config.fixture()
    specs = config.trajectories()
    trajectory.save_manifest(specs, run_dir.subpath(MANIFEST_FILE), config.provenance())
    logs = simulate_batch(specs, fixture, config.seed, config.log_rate, config.parallelism)
    for k, log in enumerate(logs):
        log.to_csv(run_dir.subpath("{}/{}".format(RAW_DIR, _traj_name(k))), config.provenance())
    return logs


def cmd_preprocess(config: ExperimentConfig, run_dir):
    paths = run_dir.list(RAW_DIR, ".csv")
    if not paths:
        raise FileNotFoundError("no raw logs in {}, run simulate first".format(run_dir.subpath(RAW_DIR)))
    raws = [RawLog.from_csv(p) for p in paths]
    datasets = run_pipeline_batch(
        raws,
        config.fixture().params,
        config.pipeline_settings(),
        config.parallelism,
    )
    # 输出沿用原始日志的文件名
    for k, dataset in datasets.items():
        name = os.path.basename(paths[k])
        dataset.to_csv(run_dir.subpath("{}/{}".format(DATASET_DIR, name)), config.provenance())
    return list(datasets.values())


def _load_datasets(run_dir):
    paths = run_dir.list(DATASET_DIR, ".csv")
    if not paths:
        raise FileNotFoundError(
            "no datasets in {}, run preprocess first".format(run_dir.subpath(DATASET_DIR)),
        )
    return [Dataset.from_csv(p) for p in paths]


def cmd_fit(config: ExperimentConfig, run_dir, kind="all"):
    if kind not in FIT_KINDS:
        raise ValueError("Invalid kind %s, values should be one of %s" % (kind, FIT_KINDS))
    datasets = _load_datasets(run_dir)
    kinds = [ModelKind.CV, ModelKind.SCV] if kind == "all" else [value_of(ModelKind, kind)]
    results = {}
    for model_kind in kinds:
        result = fit_static_model(model_kind, datasets, config.fit_settings())
        path = _fit_path(model_kind)
        result.save(
            run_dir.subpath(path),
            run_dir.subpath(path.replace(".json", "_loss.csv")),
            config.provenance(),
        )
        results[model_kind] = result
    return results


def cmd_train(config: ExperimentConfig, run_dir, pinn_config: PinnConfig = None):
    datasets = _load_datasets(run_dir)
    pinn_config = pinn_config or config.pinn_config()
    result = training.train(datasets, config.fixture().params, pinn_config)
    result.model.save(run_dir.subpath(PINN_MODEL_FILE), config.provenance())
    result.save_curves(run_dir.subpath(PINN_CURVES_FILE), config.provenance())
    return result


def cmd_sweep(config: ExperimentConfig, run_dir):
    datasets = _load_datasets(run_dir)
    result = search.random_search(
        datasets,
        config.fixture().params,
        config.search_space(),
        config.n_trials,
        config.seed,
        config.parallelism,
    )
    result.save_trials(run_dir.subpath(TRIALS_FILE), config.provenance())
    json_io.dump_json(
        {
            "best_config": result.best_config.to_dict(),
            "best_val_loss": result.best_val_loss,
            "provenance": config.provenance().to_dict(),
        },
        run_dir.subpath(BEST_CONFIG_FILE),
    )
    return result


def _compensator(kind, run_dir):
    if kind == ModelKind.NONE:
        return CompensatorHandle.none()
    if kind == ModelKind.PINN:
        if not run_dir.exists(PINN_MODEL_FILE):
            raise FileNotFoundError("{} is missing, run train first".format(PINN_MODEL_FILE))
        return CompensatorHandle.pinn(PinnModel.load(run_dir.subpath(PINN_MODEL_FILE)))
    path = _fit_path(kind)
    if not run_dir.exists(path):
        raise FileNotFoundError("{} is missing, run fit first".format(path))
    params = FitResult.load(run_dir.subpath(path)).params
    return CompensatorHandle(kind, params)


def cmd_eval(config: ExperimentConfig, run_dir):
    compensators = [_compensator(value_of(ModelKind, name), run_dir) for name in config.eval_models()]
    result = run_evaluation(
        compensators,
        config.fixture(),
        config.eval_settings(),
        config.parallelism,
    )
    traces_dir = run_dir.subpath("{}/traces/".format(EVAL_DIR))
    tracking_paths = report.emit_plot_data(result.tracking_traces, traces_dir, "tracking", config.provenance())
    report.emit_plot_data(result.recovery_traces, traces_dir, "recovery", config.provenance())
    report.emit_plot_data(
        result.common_recovery_traces,
        traces_dir,
        "common_recovery",
        config.provenance(),
    )
    for r in result.reports:
        r.trace_path = os.path.relpath(tracking_paths[r.model_kind], run_dir.get_root_path())
    json_io.dump_json(
        {
            "reports": [r.to_dict() for r in result.reports],
            "provenance": config.provenance().to_dict(),
        },
        run_dir.subpath(REPORTS_FILE),
    )
    return result


def cmd_report(config: ExperimentConfig, run_dir):
    if not run_dir.exists(REPORTS_FILE):
        raise FileNotFoundError("{} is missing, run eval first".format(REPORTS_FILE))
    doc = json_io.load_json(run_dir.subpath(REPORTS_FILE))
    reports = [ExperimentReport(**d) for d in doc["reports"]]
    traces = {
        r.model_kind: ExperimentTrace.from_csv(run_dir.subpath(r.trace_path))
        for r in reports
        if r.trace_path and run_dir.exists(r.trace_path)
    }
    out_dir = run_dir.subpath("{}/".format(REPORT_DIR))
    path = report.emit_report(
        reports,
        out_dir,
        config.provenance(),
        title="{} joint, seed {}".format(config.fixture_name, config.seed),
    )
    report.emit_plot_data(traces, out_dir, "tracking", config.provenance())
    return path


def cmd_run_all(config: ExperimentConfig, run_dir, with_sweep=False):
    with stage_timer("simulate"):
        cmd_simulate(config, run_dir)
    with stage_timer("preprocess"):
        cmd_preprocess(config, run_dir)
    with stage_timer("fit"):
        cmd_fit(config, run_dir, "all")
    pinn_config = None
    if with_sweep:
        with stage_timer("sweep"):
            pinn_config = cmd_sweep(config, run_dir).best_config
    with stage_timer("train"):
        cmd_train(config, run_dir, pinn_config)
    with stage_timer("eval"):
        cmd_eval(config, run_dir)
    with stage_timer("report"):
        return cmd_report(config, run_dir)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON")
    common.add_argument("--out", help="run directory, created under $%s when omitted" % constant.RUNS_ROOT_ENV_NAME)
    common.add_argument("--seed", type=int, help="random seed, overrides config and $%s" % constant.SEED_ENV_NAME)
    common.add_argument(
        "--fixture",
        choices=constant.SUPPORTED_FIXTURES,
        help="joint fixture, overrides config and $%s" % constant.FIXTURE_ENV_NAME,
    )

    parser = argparse.ArgumentParser(
        prog="joint_friction_id",
        description="Joint friction identification and compensation experiments.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    sub.add_parser("simulate", parents=[common], help="simulate the excitation batch")
    sub.add_parser("preprocess", parents=[common], help="filter raw logs into datasets")
    fit = sub.add_parser("fit", parents=[common], help="fit CV / SCV friction models")
    fit.add_argument("--kind", choices=FIT_KINDS, default="all")
    sub.add_parser("train", parents=[common], help="train the PINN")
    sub.add_parser("sweep", parents=[common], help="random search of PINN hyperparameters")
    sub.add_parser("eval", parents=[common], help="closed-loop evaluation of the models")
    sub.add_parser("report", parents=[common], help="render report tables")
    run_all = sub.add_parser("run-all", parents=[common], help="every stage in order")
    run_all.add_argument("--sweep", action="store_true", help="train with the best swept config")
    return parser


def _open_run_dir(args, config):
    if args.out:
        return run_dir_util.RunDir(args.out)
    return run_dir_util.create(config.seed)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, seed=args.seed, fixture=args.fixture)
    except ConfigError as e:
        print("config error at {}: {}".format(e.path, e.message), file=sys.stderr)
        return 2

    run_dir = _open_run_dir(args, config)
    create_logger(run_dir.get_root_path())
    commands = {
        "simulate": lambda: cmd_simulate(config, run_dir),
        "preprocess": lambda: cmd_preprocess(config, run_dir),
        "fit": lambda: cmd_fit(config, run_dir, args.kind),
        "train": lambda: cmd_train(config, run_dir),
        "sweep": lambda: cmd_sweep(config, run_dir),
        "eval": lambda: cmd_eval(config, run_dir),
        "report": lambda: cmd_report(config, run_dir),
        "run-all": lambda: cmd_run_all(config, run_dir, args.sweep),
    }
    try:
        with stage_timer(args.command):
            commands[args.command]()
    except ConfigError as e:
        print("config error at {}: {}".format(e.path, e.message), file=sys.stderr)
        return 2
    except Exception as e:
        logging.error("%s failed: %s", args.command, e)
        print("{} failed: {}".format(args.command, e), file=sys.stderr)
        return 1
    return 0
