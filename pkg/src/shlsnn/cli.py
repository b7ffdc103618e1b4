"""Command-line experiment driver.

Each subcommand reads a config, writes a JSON report (plus CSV series or
weight files) into ``--out`` and exits with one of the codes below. The
report carries the full resolved config under ``"config"``, and passing that
report back as ``--config`` reruns the experiment with identical results.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, experiment, fastval, kernels
from .config import ConfigError, ExperimentConfig, bundled, load
from .data import DataError
from .dynamics import SimulationFault
from .plasticity import load_weights, save_weights

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_EXPECTATION = 4
EXIT_MISSING_INPUT = 5

log = logging.getLogger("shlsnn")


class ExpectationFailure(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return f
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_report(out: Path, command: str, cfg: ExperimentConfig, body: dict) -> Path:
    report = {
        "tool": "shlsnn",
        "version": __version__,
        "command": command,
        "backend": kernels.BACKEND,
        "config": cfg.echo,
        **body,
    }
    path = out / f"{command}.json"
    path.write_text(json.dumps(_jsonable(report), indent=2, sort_keys=False) + "\n")
    return path


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _resolve_config(text: str) -> Path:
    path = Path(text)
    if path.exists():
        return path
    try:
        return bundled(text)
    except FileNotFoundError:
        raise FileNotFoundError(f"config {text!r} not found (neither a file nor a bundled config)") from None


def _config(args) -> ExperimentConfig:
    overrides = {}
    if args.seed is not None:
        overrides["run.seed"] = str(args.seed)
    if args.runs is not None:
        overrides["run.count"] = str(args.runs)
    return load(_resolve_config(args.config), overrides)


def _weights(path: Path, what: str) -> np.ndarray:
    if not path.exists():
        raise FileNotFoundError(f"{what} weight file {path} not found")
    try:
        w, _ = load_weights(path)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    return w


def cmd_bench(cfg, args, out) -> dict:
    res = experiment.bench(cfg, args.jobs)
    log.info("mean accuracy %.2f%% over %d runs", res["mean_accuracy"], cfg.runs)
    return res


def cmd_design_curve(cfg, args, out) -> dict:
    ratios = None
    if args.ratio_min is not None or args.ratio_max is not None or args.steps is not None:
        lo = args.ratio_min if args.ratio_min is not None else cfg.design.ratio_min
        hi = args.ratio_max if args.ratio_max is not None else cfg.design.ratio_max
        steps = args.steps if args.steps is not None else cfg.design.steps
        if not (0 < lo <= hi < 1) or steps < 1:
            raise ConfigError("design: need 0 < ratio_min <= ratio_max < 1 and steps >= 1")
        ratios = [lo] if steps == 1 else np.linspace(lo, hi, steps)
    rows = experiment.design_curve(cfg, args.jobs, ratios)
    cols = ["ratio", "i_max", "mean_accuracy", "std_accuracy", "mean_merit", "gap", "overlap"]
    write_csv(out / "design_curve.csv", cols, ([r[c] for c in cols] for r in rows))
    best = max(rows, key=lambda r: r["mean_accuracy"])
    return {"curve": rows, "argmax_ratio": best["ratio"], "max_accuracy": best["mean_accuracy"]}


def cmd_evolution(cfg, args, out) -> dict:
    rep, run = experiment.evolution(cfg)
    write_csv(
        out / "evolution.csv",
        ["epoch", "merit", "robustness"],
        ([e["epoch"], e["merit"], e["robustness"]] for e in rep["epochs"]),
    )
    a_epoch = cfg.noise.system_a_epoch
    save_weights(out / "system_a.weights", run.result.snapshots[a_epoch], cfg.learning.w_max)
    save_weights(out / "system_b.weights", run.result.weights, cfg.learning.w_max)
    rep["system_a_epoch"] = a_epoch
    return rep


def cmd_noise(cfg, args, out) -> dict:
    w_a = _weights(Path(args.system_a) if args.system_a else out / "system_a.weights", "system A")
    w_b = _weights(Path(args.system_b) if args.system_b else out / "system_b.weights", "system B")
    rep = experiment.noise_study(cfg, w_a, w_b)
    for name, series in rep["sweeps"].items():
        write_csv(
            out / f"noise_{name}.csv",
            ["sigma", "mean_merit", "var_merit"],
            ([p["sigma"], p["mean_merit"], p["var_merit"]] for p in series),
        )
    write_csv(
        out / "correlation.csv",
        ["system", "replica", "merit", "accuracy"],
        ([p["system"], p["replica"], p["merit"], p["accuracy"]] for p in rep["correlation"]["pairs"]),
    )
    return rep


def _trained_or_loaded(cfg, args) -> np.ndarray:
    if args.weights:
        return _weights(Path(args.weights), "input")
    return experiment.train_run(experiment.prepare(cfg), cfg, 0).result.weights


def cmd_timing(cfg, args, out) -> dict:
    return experiment.timing(cfg, _trained_or_loaded(cfg, args))


def cmd_train(cfg, args, out) -> dict:
    prep = experiment.prepare(cfg)
    run = experiment.train_run(prep, cfg, 0)
    save_weights(out / "weights.txt", run.result.weights, cfg.learning.w_max)
    merits = [
        fastval.merit_figure(fastval.project(prep.currents, w, prep.i_th), prep.labels) for w in run.result.snapshots
    ]
    return {"run_seed": run.seed, "train": run.split.as_dict()["train"], "merit_per_epoch": merits}


def cmd_test(cfg, args, out) -> dict:
    w = _weights(Path(args.weights), "input")
    return experiment.evaluate(experiment.prepare(cfg), cfg, w)


def cmd_fastval(cfg, args, out) -> dict:
    w = _weights(Path(args.weights), "input")
    prep = experiment.prepare(cfg)
    rep = fastval.report(prep.currents, prep.labels, w, prep.i_th)
    n = w.shape[1]
    write_csv(
        out / "current_space.csv",
        ["sample", "label"] + [f"I_total_{j + 1}" for j in range(n)],
        ([s, int(lab)] + [float(v) for v in pt] for s, (lab, pt) in enumerate(zip(prep.labels, rep.points))),
    )
    return rep.as_dict()


COMMANDS = {
    "bench": cmd_bench,
    "design-curve": cmd_design_curve,
    "evolution": cmd_evolution,
    "noise": cmd_noise,
    "timing": cmd_timing,
    "train": cmd_train,
    "test": cmd_test,
    "fastval": cmd_fastval,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="config file, JSON report, or bundled config name")
    common.add_argument("--seed", type=int, help="master seed (overrides run.seed)")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--runs", type=int, help="number of independent runs (overrides run.count)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent runs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="shlsnn", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"shlsnn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bench", parents=[common], help="mean accuracy over seeded train+test runs")
    p = sub.add_parser("design-curve", parents=[common], help="accuracy versus I_th/I_max")
    p.add_argument("--ratio-min", type=float)
    p.add_argument("--ratio-max", type=float)
    p.add_argument("--steps", type=int)
    sub.add_parser("evolution", parents=[common], help="per-epoch merit and robustness; saves systems A and B")
    p = sub.add_parser("noise", parents=[common], help="weight-noise sweeps and merit/accuracy correlation")
    p.add_argument("--system-a", help="weights of system A (default: <out>/system_a.weights)")
    p.add_argument("--system-b", help="weights of system B (default: <out>/system_b.weights)")
    p = sub.add_parser("timing", parents=[common], help="transient test versus current-space evaluation")
    p.add_argument("--weights", help="weight file (default: train run 0)")
    sub.add_parser("train", parents=[common], help="train run 0 and save its weights")
    for name, text in (("test", "transient recognition test"), ("fastval", "current-space report")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--weights", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.runs is not None and args.runs < 1:
            raise ConfigError("--runs must be >= 1")
        if args.seed is not None and args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        cfg = _config(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        body = COMMANDS[args.command](cfg, args, out)
        path = write_report(out, args.command, cfg, body)
        log.info("wrote %s", path)
        exp = body.get("expectation")
        if exp is not None and not exp["pass"]:
            raise ExpectationFailure(
                f"mean accuracy {body['mean_accuracy']:.2f} outside {exp['accuracy']} +- {exp['tolerance']}"
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, DataError) as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except SimulationFault as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except ExpectationFailure as exc:
        print(f"expectation failed: {exc}", file=sys.stderr)
        return EXIT_EXPECTATION
    return EXIT_OK
