"""Time one sample exposure on the compiled and pure-Python kernels.

Usage::

    python benchmarks/bench_kernels.py [--samples 20] [--config wisconsin-3rbf]

Both backends run the same exposures (learning on and off) on the same
weights, and the script checks that their outputs are bit-identical.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from shlsnn import kernels
from shlsnn.config import bundled, load
from shlsnn.experiment import prepare
from shlsnn.network import expose, pack_params
from shlsnn.plasticity import init_weights


def run_backend(run, currents, weights, bias, params, learn):
    w = weights.copy()
    start = time.perf_counter()
    counts = [expose(c, w, bias, params, learn, run=run)[0] for c in currents]
    return time.perf_counter() - start, np.array(counts), w


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--config", default="wisconsin-3rbf")
    parser.add_argument("--samples", type=int, default=20)
    args = parser.parse_args()

    cfg = load(bundled(args.config))
    prep = prepare(cfg)
    currents = prep.currents[: args.samples]
    m, n = prep.currents.shape[1], prep.network.n_outputs
    weights = np.ascontiguousarray(init_weights((m, n), cfg.learning.init_fraction, cfg.learning.w_max, seed=0))
    bias = np.zeros(n)
    bias[0] = cfg.bias
    params = pack_params(prep.network, cfg.exposure, cfg.learning)
    steps = int(params[1])
    print(f"{args.config}: {m} inputs, {n} outputs, {steps} steps per exposure, {len(currents)} samples")

    if kernels.compiled_run_exposure is None:
        print("compiled extension not built; only the Python kernel is available")
    for learn in (False, True):
        t_py, c_py, w_py = run_backend(kernels.python_run_exposure, currents, weights, bias, params, learn)
        line = f"learn={learn!s:5}  python {1e3 * t_py / len(currents):8.2f} ms/sample"
        if kernels.compiled_run_exposure is not None:
            t_c, c_c, w_c = run_backend(kernels.compiled_run_exposure, currents, weights, bias, params, learn)
            same = np.array_equal(c_py, c_c) and np.array_equal(w_py, w_c)
            line += f"  cython {1e3 * t_c / len(currents):8.3f} ms/sample  speedup {t_py / t_c:7.1f}x  identical={same}"
        print(line)


if __name__ == "__main__":
    main()
