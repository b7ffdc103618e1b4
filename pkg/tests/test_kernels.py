from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from shlsnn import kernels
from shlsnn.dynamics import SimulationFault
from shlsnn.encoding import EncoderConfig
from shlsnn.network import NetworkConfig, expose, pack_params, spike_trains
from shlsnn.plasticity import LearningParams, apply_pairing

compiled = pytest.mark.skipif(kernels.compiled_run_exposure is None, reason="extension not built")


def _setup(seed=0, m=6, n=3, learning=None):
    rng = np.random.default_rng(seed)
    cfg = NetworkConfig(encoder=EncoderConfig.linear(["high", "low"]), n_features=m // 2, n_outputs=n, lateral_weight=-50.0)
    lp = learning or LearningParams(a_up=20.0, a_down=-20.0, w_max=500.0)
    currents = rng.uniform(2.8e-9, 8e-9, size=m)
    w = np.ascontiguousarray(rng.uniform(150, 450, size=(m, n)))
    bias = np.zeros(n)
    bias[rng.integers(n)] = -1e-9
    return cfg, lp, currents, w, bias, pack_params(cfg, 0.1, lp)


@compiled
@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("learn", [False, True])
def test_compiled_and_python_kernels_agree_bit_for_bit(seed, learn):
    cfg, lp, cur, w, bias, p = _setup(seed)
    w_c, w_p = w.copy(), w.copy()
    c_counts, c_rec = expose(cur, w_c, bias, p, learn, record=True, run=kernels.compiled_run_exposure)
    p_counts, p_rec = expose(cur, w_p, bias, p, learn, record=True, run=kernels.python_run_exposure)
    assert np.array_equal(c_counts, p_counts)
    assert np.array_equal(c_rec, p_rec)
    assert np.array_equal(w_c, w_p)


@pytest.mark.parametrize("seed", range(4))
def test_online_updates_match_offline_replay(seed):
    cfg, lp, cur, w, bias, p = _setup(seed)
    w0 = w.copy()
    counts, rec = expose(cur, w, bias, p, learn=True, record=True)
    trains = spike_trains(counts, rec, cfg.dt)
    m = cur.shape[0]
    assert counts[m:].sum() > 0, "scenario should make outputs fire"
    for i in range(m):
        for j in range(w.shape[1]):
            expected = apply_pairing(trains[i], trains[m + j], w0[i, j], lp)
            assert w[i, j] == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_no_learning_leaves_weights():
    cfg, lp, cur, w, bias, p = _setup(1)
    w0 = w.copy()
    expose(cur, w, bias, p, learn=False)
    assert np.array_equal(w, w0)


def test_input_spike_counts_match_closed_form():
    from shlsnn.dynamics import analytic_isi

    cfg, lp, cur, w, bias, p = _setup(2)
    counts, _ = expose(cur, np.zeros_like(w), bias, p, learn=False)
    for i, I in enumerate(cur):
        expected = 0.1 / analytic_isi(cfg.neuron_in, I)
        assert abs(counts[i] - expected) <= 0.02 * expected + 1.0


def test_non_finite_currents_are_faults():
    cfg, lp, cur, w, bias, p = _setup(0)
    with pytest.raises(SimulationFault, match="non-finite"):
        expose(np.full_like(cur, np.inf), w, bias, p, learn=False)
    w[0, 0] = np.nan
    with pytest.raises(SimulationFault, match="non-finite"):
        expose(cur, w, bias, p, learn=False)


@pytest.mark.parametrize("run", [kernels.python_run_exposure, kernels.compiled_run_exposure])
def test_kernel_status_flags_nan_state(run):
    if run is None:
        pytest.skip("extension not built")
    cfg, lp, cur, w, bias, p = _setup(0)
    cur[0] = np.nan
    counts = np.zeros(cur.shape[0] + w.shape[1], dtype=np.int64)
    assert run(cur, w, bias, p, False, counts, None) == 1


def test_environment_variable_selects_fallback():
    env = dict(os.environ, SHLSNN_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from shlsnn import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
