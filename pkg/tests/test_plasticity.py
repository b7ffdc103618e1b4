from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shlsnn.plasticity import (
    LearningParams,
    apply_pairing,
    clamp,
    delta_w,
    init_weights,
    load_weights,
    save_weights,
)

LP = LearningParams()
spike_lists = st.lists(st.floats(0.0, 0.2, allow_nan=False), max_size=12).map(sorted)


def potentiation_oracle(w, dt, a_up=5.0, mu=2.0, w_max=500.0, tau=10e-3):
    return a_up * (1 - w / w_max) ** mu * math.exp(-dt / tau)


def depression_oracle(w, dt, a_down=-10.0, mu=2.0, w_max=500.0, tau=20e-3):
    return a_down * (w / w_max) ** mu * math.exp(dt / tau)


@pytest.mark.parametrize(
    "kwargs",
    [dict(a_up=0.0), dict(a_down=1.0), dict(mu=1.0), dict(tau_up=0.0), dict(w_max=0.0), dict(init_fraction=1.5)],
)
def test_invalid_learning_params(kwargs):
    with pytest.raises(ValueError):
        LearningParams(**kwargs)


def test_saturation_at_both_rails():
    assert delta_w(LP.w_max, 1e-3, LP) == 0.0
    assert delta_w(0.0, -1e-3, LP) == 0.0


def test_half_weight_potentiation_hand_value():
    assert delta_w(250.0, 10e-3, LP) == pytest.approx(5 * 0.25 * math.exp(-1), rel=1e-12)
    assert delta_w(250.0, 10e-3, LP) == pytest.approx(0.4598, abs=1e-4)


def test_simultaneous_spikes_do_not_update():
    assert delta_w(100.0, 0.0, LP) == 0.0


@given(st.floats(0.0, 500.0), st.floats(1e-6, 0.2))
def test_sign_follows_causality(w, dt):
    assert delta_w(w, dt, LP) >= 0.0
    assert delta_w(w, -dt, LP) <= 0.0


@given(st.floats(1.0, 499.0), st.floats(1e-5, 0.1), st.floats(1e-5, 0.1))
def test_magnitude_decreases_with_delay(w, a, b):
    short, long = sorted((a, b))
    if short == long:
        return
    assert delta_w(w, short, LP) > delta_w(w, long, LP)
    assert abs(delta_w(w, -short, LP)) > abs(delta_w(w, -long, LP))


def test_no_post_spikes_leaves_weight():
    assert apply_pairing([0.01, 0.02], [], 123.0, LP) == 123.0
    assert apply_pairing([], [], 123.0, LP) == 123.0


def test_single_causal_pair():
    w = apply_pairing([10e-3], [15e-3], 250.0, LP)
    assert w == pytest.approx(250.0 + potentiation_oracle(250.0, 5e-3), rel=1e-12)


def test_potentiation_then_depression():
    w0 = 250.0
    w1 = w0 + potentiation_oracle(w0, 10e-3)
    w2 = w1 + depression_oracle(w1, -10e-3)
    assert apply_pairing([10e-3, 30e-3], [20e-3], w0, LP) == pytest.approx(w2, rel=1e-12)


def test_each_spike_pairs_once_per_direction():
    # two posts after one pre: only the first post potentiates
    w = apply_pairing([10e-3], [12e-3, 14e-3], 100.0, LP)
    assert w == pytest.approx(100.0 + potentiation_oracle(100.0, 2e-3), rel=1e-12)


def test_coincident_spikes_pair_with_earlier_partners_only():
    # pre at 5 ms, post and a second pre at 10 ms: one potentiation, no depression
    w = apply_pairing([5e-3, 10e-3], [10e-3], 100.0, LP)
    assert w == pytest.approx(100.0 + potentiation_oracle(100.0, 5e-3), rel=1e-12)


@given(spike_lists, spike_lists, st.floats(0.0, 1.0), st.floats(0.5, 50.0), st.floats(-50.0, -0.5))
def test_pairing_keeps_weight_in_range(pre, post, frac, a_up, a_down):
    lp = LearningParams(a_up=a_up, a_down=a_down, w_max=300.0)
    w = apply_pairing(pre, post, frac * 300.0, lp)
    assert 0.0 <= w <= 300.0


def test_fuzzed_pairings_never_leave_bounds():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        lp = LearningParams(a_up=rng.uniform(1, 1000), a_down=-rng.uniform(1, 1000), mu=rng.uniform(1.01, 4), w_max=300.0)
        w = rng.uniform(0, 300.0)
        dt = rng.uniform(-0.05, 0.05)
        w = clamp(w + delta_w(w, dt, lp), lp.w_max)
        assert 0.0 <= w <= lp.w_max


@given(st.floats(0.0, 500.0))
def test_repeated_potentiation_converges_without_overshoot(w):
    lp = LearningParams(a_up=10.0)
    prev = w
    for _ in range(200):
        nxt = clamp(prev + delta_w(prev, 1e-3, lp), lp.w_max)
        assert prev <= nxt <= lp.w_max
        prev = nxt
    assert prev > w or w == lp.w_max or prev == lp.w_max


@given(st.floats(0.0, 500.0))
def test_repeated_depression_converges_without_undershoot(w):
    lp = LearningParams(a_down=-20.0)
    prev = w
    for _ in range(200):
        nxt = clamp(prev + delta_w(prev, -1e-3, lp), lp.w_max)
        assert 0.0 <= nxt <= prev
        prev = nxt


def test_init_weights_mean_and_bounds():
    w = init_weights((40, 40), 0.4, 500.0, seed=3)
    assert abs(w.mean() - 200.0) <= 10.0
    assert w.min() >= 150.0 and w.max() <= 250.0


def test_init_weights_without_spread():
    assert np.all(init_weights((3, 2), 0.4, 500.0, seed=0, spread=0.0) == 200.0)


def test_init_weights_deterministic_per_seed():
    a = init_weights((5, 3), 0.33, 300.0, seed=11)
    assert np.array_equal(a, init_weights((5, 3), 0.33, 300.0, seed=11))
    assert not np.array_equal(a, init_weights((5, 3), 0.33, 300.0, seed=12))


def test_init_weights_rejects_bad_shape():
    with pytest.raises(ValueError):
        init_weights((0, 3), 0.4, 500.0, seed=0)


def test_weight_file_round_trip(tmp_path):
    w = np.random.default_rng(0).uniform(0, 500, size=(7, 3))
    save_weights(tmp_path / "w.txt", w, 500.0)
    head = (tmp_path / "w.txt").read_text().splitlines()[0]
    assert head == "7 3 500.0"
    w2, w_max = load_weights(tmp_path / "w.txt")
    assert np.array_equal(w, w2) and w_max == 500.0


def test_weight_file_rejects_truncation(tmp_path):
    (tmp_path / "w.txt").write_text("2 2 10\n1 2\n")
    with pytest.raises(ValueError):
        load_weights(tmp_path / "w.txt")
