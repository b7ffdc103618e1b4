from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shlsnn.dynamics import (
    EXCITATORY,
    INHIBITORY,
    NeuronParams,
    NeuronState,
    SimulationFault,
    SynapseParams,
    analytic_isi,
    kernel_peak_time,
    lif_step,
    simulate_isi,
    synapse_current,
    synapse_kernel,
    threshold_current,
)

P = NeuronParams()
I_TH = threshold_current(P)


def isi_oracle(C, g, E_l, V_t, I):
    """Closed-form time to climb from E_l to V_t under constant current I."""
    v_inf = E_l + I / g
    if v_inf <= V_t:
        return math.inf
    return (C / g) * math.log((v_inf - E_l) / (v_inf - V_t))


def test_defaults():
    assert (P.C, P.g, P.E_l, P.V_t) == (300e-12, 30e-9, -70e-3, 20e-3)
    assert (EXCITATORY.I_0, EXCITATORY.tau_m, EXCITATORY.tau_s) == (10e-12, 10e-3, 2.5e-3)
    assert (INHIBITORY.I_0, INHIBITORY.tau_m) == (0.1e-9, 50e-3)


def test_threshold_current():
    assert I_TH == pytest.approx(2.7e-9, rel=1e-12)
    assert threshold_current(NeuronParams(V_t=-70e-3)) == 0.0
    assert threshold_current(NeuronParams(g=60e-9)) == pytest.approx(2 * I_TH)


@pytest.mark.parametrize(
    "kwargs", [dict(C=0.0), dict(g=-1e-9), dict(V_t=-80e-3)]
)
def test_invalid_neuron_params(kwargs):
    with pytest.raises(ValueError):
        NeuronParams(**kwargs)


@pytest.mark.parametrize(
    "kwargs", [dict(I_0=0.0), dict(tau_m=2e-3, tau_s=2.5e-3), dict(tau_s=0.0), dict(polarity="modulatory")]
)
def test_invalid_synapse_params(kwargs):
    with pytest.raises(ValueError):
        SynapseParams(**kwargs)


def test_rest_is_a_fixed_point():
    s = NeuronState.at_rest(P)
    s2, spiked = lif_step(s, 0.0, 1e-4, P)
    assert s2.V == P.E_l and not spiked


def test_subthreshold_current_settles_below_threshold():
    s = NeuronState.at_rest(P)
    I = 2.0e-9
    for _ in range(5000):
        s, spiked = lif_step(s, I, 1e-4, P)
        assert not spiked
    assert s.V == pytest.approx(P.E_l + I / P.g, rel=1e-6)
    assert s.V < P.V_t


def test_spike_resets_and_records_time():
    s = NeuronState(V=P.V_t - 1e-6, t=0.5)
    s2, spiked = lif_step(s, 4e-9, 1e-4, P)
    assert spiked and s2.V == P.E_l
    assert s2.spike_times == [pytest.approx(0.5001)]


def test_non_finite_input_is_a_fault():
    with pytest.raises(SimulationFault):
        lif_step(NeuronState.at_rest(P), float("nan"), 1e-4, P)
    with pytest.raises(SimulationFault):
        lif_step(NeuronState(V=float("inf")), 0.0, 1e-4, P)
    with pytest.raises(ValueError):
        lif_step(NeuronState.at_rest(P), 0.0, 0.0, P)


def test_analytic_isi_four_nanoamps():
    assert analytic_isi(P, 4e-9) == pytest.approx(isi_oracle(300e-12, 30e-9, -70e-3, 20e-3, 4e-9), rel=1e-12)
    assert analytic_isi(P, 4e-9) * 1e3 == pytest.approx(11.239, abs=5e-4)


def test_analytic_isi_limits():
    assert analytic_isi(P, I_TH) == math.inf
    assert analytic_isi(P, 0.0) == math.inf
    assert analytic_isi(P, 1e-3) < 1e-6
    with pytest.raises(ValueError):
        analytic_isi(P, float("inf"))


def test_simulated_isi_four_nanoamps():
    assert simulate_isi(P, 4e-9, 1e-5) * 1e3 == pytest.approx(11.24, rel=1e-2)
    assert simulate_isi(P, 4e-9, 1e-6, t_max=0.02) == pytest.approx(analytic_isi(P, 4e-9), rel=1e-3)


@settings(max_examples=40)
@given(st.floats(1.001, 10.0))
def test_euler_matches_closed_form_within_one_percent(multiple):
    I = multiple * I_TH
    expected = isi_oracle(P.C, P.g, P.E_l, P.V_t, I)
    assert simulate_isi(P, I, 1e-5, t_max=0.1) == pytest.approx(expected, rel=1e-2)


@given(st.floats(0.0, 1.0))
def test_never_spikes_at_or_below_threshold(fraction):
    assert simulate_isi(P, fraction * I_TH, 1e-4, t_max=0.3) == math.inf


def test_rate_strictly_increasing_above_threshold():
    currents = np.linspace(1.05, 10, 30) * I_TH
    isis = [analytic_isi(P, I) for I in currents]
    assert all(b < a for a, b in zip(isis, isis[1:]))
    sims = [simulate_isi(P, I, 1e-5, t_max=0.1) for I in currents[::6]]
    assert all(b < a for a, b in zip(sims, sims[1:]))


def test_kernel_vanishes_at_onset_and_before():
    assert synapse_kernel(0.0, EXCITATORY) == 0.0
    assert synapse_kernel(-1e-3, EXCITATORY) == 0.0
    assert synapse_current(3.0, EXCITATORY, [], 0.1) == 0.0


def test_kernel_peak_time():
    t_peak = kernel_peak_time(EXCITATORY)
    assert t_peak * 1e3 == pytest.approx(4.62, abs=5e-3)
    s = np.linspace(0, 0.02, 200_001)
    vals = [synapse_kernel(x, EXCITATORY) for x in s[::10]]
    assert s[::10][int(np.argmax(vals))] == pytest.approx(t_peak, abs=2e-6)


@given(st.floats(-1e3, 1e3), st.lists(st.floats(0.0, 0.5), max_size=6), st.floats(0.0, 0.6))
def test_current_linear_in_weight(w, spikes, t):
    a = synapse_current(w, EXCITATORY, spikes, t)
    b = synapse_current(2 * w, EXCITATORY, spikes, t)
    assert b == pytest.approx(2 * a, rel=1e-12, abs=1e-30)


@given(st.floats(0.0, 0.5), st.floats(0.0, 0.5), st.floats(0.0, 1.0))
def test_superposition(t1, t2, t):
    both = synapse_current(1.0, INHIBITORY, [t1, t2], t)
    apart = synapse_current(1.0, INHIBITORY, [t1], t) + synapse_current(1.0, INHIBITORY, [t2], t)
    assert both == pytest.approx(apart, rel=1e-12, abs=1e-30)


@given(st.floats(0.0, 1.0), st.sampled_from([EXCITATORY, INHIBITORY]))
def test_kernel_non_negative(s, params):
    assert synapse_kernel(s, params) >= 0.0


def test_horizon_drops_old_spikes():
    t = 1.0
    old = t - 10 * EXCITATORY.tau_m - 1e-3
    assert synapse_current(1.0, EXCITATORY, [old], t) == 0.0
    assert synapse_current(1.0, EXCITATORY, [old], t, horizon=math.inf) > 0.0
