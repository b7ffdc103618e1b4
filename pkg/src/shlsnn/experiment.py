"""Experiment drivers behind the CLI subcommands.

Every function takes an :class:`~shlsnn.config.ExperimentConfig` and returns
plain dicts and arrays, so results can be serialized and compared directly.
Run ``k`` of an experiment trains with seed ``derive_seed(config.seed, k)``;
independent runs may be spread over a process pool, and the pool size never
changes the results.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from multiprocessing import get_context

import numpy as np

from . import data, fastval
from .config import ExperimentConfig, derive_seed
from .dynamics import threshold_current
from .encoding import coverage_analysis
from .network import NetworkConfig, TrainingResult, TrainingSchedule, input_currents, test_currents, train_currents


@dataclass
class Prepared:
    dataset: data.Dataset
    network: NetworkConfig
    currents: np.ndarray

    @property
    def labels(self) -> np.ndarray:
        return self.dataset.labels

    @property
    def i_th(self) -> float:
        return threshold_current(self.network.neuron_in)


def load_dataset(cfg: ExperimentConfig) -> data.Dataset:
    if cfg.dataset_path:
        if cfg.dataset not in data.BUILTIN:
            raise data.DataError(f"dataset.name {cfg.dataset!r} has no known file format")
        return data.load(cfg.dataset_path, data.BUILTIN[cfg.dataset][1], name=cfg.dataset)
    return data.load_builtin(cfg.dataset)


def prepare(cfg: ExperimentConfig, encoder=None) -> Prepared:
    ds = load_dataset(cfg)
    enc = encoder or cfg.encoder
    net = NetworkConfig(
        encoder=enc,
        n_features=ds.n_features,
        n_outputs=ds.n_classes,
        neuron_in=cfg.neuron_in,
        neuron_out=cfg.neuron_out,
        excitatory=cfg.excitatory,
        inhibitory=cfg.inhibitory,
        lateral_weight=cfg.lateral_weight,
        bias=cfg.bias,
        dt=cfg.dt,
    )
    return Prepared(ds, net, input_currents(ds, enc))


@dataclass
class TrainedRun:
    index: int
    seed: int
    split: data.Split
    result: TrainingResult


def train_run(prep: Prepared, cfg: ExperimentConfig, k: int) -> TrainedRun:
    run_seed = derive_seed(cfg.seed, k)
    split = data.stratified_split(prep.dataset, cfg.per_class, derive_seed(run_seed, 0))
    schedule = TrainingSchedule(
        epochs=cfg.epochs,
        train_order=tuple(int(i) for i in split.training_order()),
        exposure=cfg.exposure,
        seed=derive_seed(run_seed, 1),
        idle=cfg.idle,
    )
    result = train_currents(prep.currents, prep.labels, prep.network, schedule, cfg.learning)
    return TrainedRun(k, run_seed, split, result)


def evaluate(prep: Prepared, cfg: ExperimentConfig, weights: np.ndarray) -> dict:
    rec = test_currents(prep.currents, prep.labels, weights, prep.network, cfg.test_exposure)
    pts = fastval.project(prep.currents, weights, prep.i_th)
    return {"accuracy": rec.accuracy, "tally": rec.tally(), "merit": fastval.merit_figure(pts, prep.labels)}


def _bench_job(args) -> dict:
    cfg, k, encoder = args
    prep = prepare(cfg, encoder)
    run = train_run(prep, cfg, k)
    out = {"run": k, "seed": run.seed, "train": run.split.as_dict()["train"]}
    out.update(evaluate(prep, cfg, run.result.weights))
    return out


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with get_context("fork").Pool(min(jobs, len(items))) as pool:
        return pool.map(fn, items)


def _summary(values) -> dict:
    arr = np.asarray(values, dtype=float)
    return {"mean": float(arr.mean()), "std": float(arr.std(ddof=1)) if arr.size > 1 else 0.0}


def bench(cfg: ExperimentConfig, jobs: int = 1, encoder=None) -> dict:
    runs = _map(_bench_job, [(cfg, k, encoder) for k in range(cfg.runs)], jobs)
    acc = _summary([r["accuracy"] for r in runs])
    out = {
        "runs": runs,
        "mean_accuracy": acc["mean"],
        "std_accuracy": acc["std"],
        "mean_merit": _summary([r["merit"] for r in runs])["mean"],
    }
    if cfg.expect_accuracy is not None:
        out["expectation"] = {
            "accuracy": cfg.expect_accuracy,
            "tolerance": cfg.expect_tolerance,
            "pass": abs(acc["mean"] - cfg.expect_accuracy) <= cfg.expect_tolerance,
        }
    return out


def design_curve(cfg: ExperimentConfig, jobs: int = 1, ratios=None) -> list[dict]:
    """Mean accuracy with ``I_max = I_th / ratio`` for each ratio."""
    i_th = threshold_current(cfg.neuron_in)
    ratios = cfg.design.ratios() if ratios is None else np.asarray(ratios, dtype=float)
    rows = []
    for ratio in ratios:
        enc = cfg.encoder.with_i_max(i_th / float(ratio))
        res = bench(cfg, jobs, encoder=enc)
        cov = coverage_analysis(enc, i_th)
        rows.append(
            {
                "ratio": float(ratio),
                "i_max": enc.i_max,
                "mean_accuracy": res["mean_accuracy"],
                "std_accuracy": res["std_accuracy"],
                "mean_merit": res["mean_merit"],
                "gap": cov.gap,
                "overlap": cov.overlap,
            }
        )
    return rows


def evolution(cfg: ExperimentConfig, prep: Prepared | None = None) -> tuple[dict, TrainedRun]:
    """Merit and robustness after every epoch of run 0.

    The robustness normalizer comes from the final snapshot's noiseless point
    cloud and is reused for every epoch, so the values are comparable.
    """
    prep = prep or prepare(cfg)
    run = train_run(prep, cfg, 0)
    final = fastval.project(prep.currents, run.result.weights, prep.i_th)
    scale = float(final.max())
    epochs = []
    for e, w in enumerate(run.result.snapshots):
        pts = fastval.project(prep.currents, w, prep.i_th)
        rob = fastval.robustness_metric(pts, prep.labels, prep.network.n_outputs, scale)
        epochs.append(
            {
                "epoch": e,
                "merit": fastval.merit_figure(pts, prep.labels),
                "robustness": rob.metric,
                "d": rob.distances.tolist(),
            }
        )
    final_eval = evaluate(prep, cfg, run.result.weights)
    report = {
        "run_seed": run.seed,
        "scale": scale,
        "epochs": epochs,
        "final_accuracy": final_eval["accuracy"],
        "final_tally": final_eval["tally"],
        "merit_accuracy_gap": abs(epochs[-1]["merit"] - final_eval["accuracy"]),
    }
    return report, run


def noise_study(cfg: ExperimentConfig, w_a: np.ndarray, w_b: np.ndarray, prep: Prepared | None = None) -> dict:
    """Noise sweeps of systems A and B plus the merit/accuracy correlation set.

    Both systems see the same noise draws (common random numbers), which makes
    the A-versus-B comparison sharper without biasing either curve.
    """
    prep = prep or prepare(cfg)
    n = cfg.noise
    w_max = cfg.learning.w_max
    noise_seed = derive_seed(cfg.seed, 1_000_000)
    systems = {"A": w_a, "B": w_b}
    sweeps, crossings, noiseless = {}, {}, {}
    for name, w in systems.items():
        pts = fastval.project(prep.currents, w, prep.i_th)
        noiseless[name] = fastval.merit_figure(pts, prep.labels)
        sweeps[name] = fastval.noise_sweep(w, n.sigmas, n.replicas, prep.currents, prep.labels, prep.i_th, w_max, noise_seed)
        crossings[name] = fastval.crossing_sigma(sweeps[name], n.level, start=noiseless[name])

    pairs = []
    for name, w in systems.items():
        for r in range(n.correlation_replicas):
            noisy = fastval.add_weight_noise(w, n.correlation_sigma, (noise_seed, 1, r), w_max)
            ev = evaluate(prep, cfg, noisy)
            pairs.append({"system": name, "replica": r, "merit": ev["merit"], "accuracy": ev["accuracy"]})
    try:
        r_value = fastval.merit_accuracy_correlation([(p["merit"], p["accuracy"]) for p in pairs])
    except ValueError:
        r_value = math.nan

    a, b = sweeps["A"], sweeps["B"]
    ca, cb = crossings["A"], crossings["B"]
    return {
        "noiseless_merit": noiseless,
        "sweeps": {k: [vars(p) for p in v] for k, v in sweeps.items()},
        "crossing_sigma": crossings,
        "crossing_ratio": (cb / ca) if ca > 0 else math.inf,
        "b_dominates": all(pb.mean_merit >= pa.mean_merit for pa, pb in zip(a, b)),
        "correlation": {"sigma": n.correlation_sigma, "pairs": pairs, "pearson_r": r_value},
    }


def _time_call(fn, min_total: float = 0.2, repeats: int = 5) -> float:
    """Best per-call wall time over ``repeats`` batches of at least ``min_total`` seconds."""
    best = math.inf
    for _ in range(repeats):
        n, t0 = 0, time.perf_counter()
        while True:
            fn()
            n += 1
            elapsed = time.perf_counter() - t0
            if elapsed >= min_total:
                break
        best = min(best, elapsed / n)
    return best


def timing(cfg: ExperimentConfig, weights: np.ndarray, prep: Prepared | None = None) -> dict:
    """Wall-clock of the transient test versus the current-space evaluation."""
    prep = prep or prepare(cfg)
    t0 = time.perf_counter()
    test_currents(prep.currents, prep.labels, weights, prep.network, cfg.test_exposure)
    transient = time.perf_counter() - t0

    def fast(cur=prep.currents, lab=prep.labels):
        return fastval.merit_figure(fastval.project(cur, weights, prep.i_th), lab)

    fast_time = _time_call(fast)
    sizes, times = [], []
    for mult in (1, 2, 4):
        cur = np.tile(prep.currents, (mult, 1))
        lab = np.tile(prep.labels, mult)
        sizes.append(int(cur.shape[0]))
        times.append(_time_call(lambda: fast(cur, lab), min_total=0.05))
    slope, intercept = np.polyfit(sizes, times, 1)
    fit = np.polyval([slope, intercept], sizes)
    ss_res = float(np.sum((np.asarray(times) - fit) ** 2))
    ss_tot = float(np.sum((np.asarray(times) - np.mean(times)) ** 2))
    return {
        "samples": int(prep.currents.shape[0]),
        "transient_s": transient,
        "fastval_s": fast_time,
        "speedup": transient / fast_time if fast_time > 0 else math.inf,
        "scaling": {"sizes": sizes, "fastval_s": times, "r2": 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0},
    }
