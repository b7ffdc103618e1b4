"""Leaky integrate-and-fire neurons and double-exponential synaptic currents.

All quantities are SI (volts, amperes, seconds, farads, siemens).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable


class SimulationFault(RuntimeError):
    """Raised when the membrane state or input current becomes non-finite."""


@dataclass(frozen=True)
class NeuronParams:
    C: float = 300e-12
    g: float = 30e-9
    E_l: float = -70e-3
    V_t: float = 20e-3

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError(f"C must be > 0, got {self.C}")
        if not self.g > 0:
            raise ValueError(f"g must be > 0, got {self.g}")
        if not self.V_t >= self.E_l:
            raise ValueError(f"V_t ({self.V_t}) must not be below E_l ({self.E_l})")

    @property
    def tau(self) -> float:
        """Membrane time constant C/g."""
        return self.C / self.g


@dataclass(frozen=True)
class SynapseParams:
    I_0: float = 10e-12
    tau_m: float = 10e-3
    tau_s: float = 2.5e-3
    polarity: str = "excitatory"

    def __post_init__(self):
        if not self.I_0 > 0:
            raise ValueError(f"I_0 must be > 0, got {self.I_0}")
        if not self.tau_m > self.tau_s > 0:
            raise ValueError(f"need tau_m > tau_s > 0, got {self.tau_m}, {self.tau_s}")
        if self.polarity not in ("excitatory", "inhibitory"):
            raise ValueError(f"unknown polarity {self.polarity!r}")


EXCITATORY = SynapseParams()
# only I_0 and tau_m differ from the excitatory synapse; tau_s is shared
INHIBITORY = SynapseParams(I_0=0.1e-9, tau_m=50e-3, tau_s=2.5e-3, polarity="inhibitory")


@dataclass
class NeuronState:
    V: float
    t: float = 0.0
    spike_times: list[float] = field(default_factory=list)

    @classmethod
    def at_rest(cls, params: NeuronParams) -> NeuronState:
        return cls(V=params.E_l)


def lif_step(
    state: NeuronState, I: float, dt: float, params: NeuronParams = NeuronParams()
) -> tuple[NeuronState, bool]:
    """Advance one forward-Euler step of ``C dV/dt = -g (V - E_l) + I``.

    Crossing ``V_t`` records a spike at the end of the step and resets the
    membrane to ``E_l``. There is no refractory period.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not (math.isfinite(I) and math.isfinite(state.V)):
        raise SimulationFault(f"non-finite state at t={state.t}: V={state.V}, I={I}")
    V = state.V + dt / params.C * (-params.g * (state.V - params.E_l) + I)
    t = state.t + dt
    spikes = state.spike_times
    spiked = V >= params.V_t
    if spiked:
        V = params.E_l
        spikes = spikes + [t]
    return replace(state, V=V, t=t, spike_times=spikes), spiked


def threshold_current(params: NeuronParams = NeuronParams()) -> float:
    """Smallest constant current that eventually drives the neuron to fire."""
    return params.g * (params.V_t - params.E_l)


def analytic_isi(params: NeuronParams, I: float) -> float:
    """Exact inter-spike interval under constant current; ``math.inf`` if it never fires."""
    if not math.isfinite(I):
        raise ValueError(f"current must be finite, got {I}")
    i_th = threshold_current(params)
    if I <= i_th:
        return math.inf
    return params.tau * math.log(I / (I - i_th))


def simulate_isi(params: NeuronParams, I: float, dt: float, t_max: float = 1.0) -> float:
    """First-spike time from rest by stepping :func:`lif_step`; ``math.inf`` if none by ``t_max``."""
    state = NeuronState.at_rest(params)
    for _ in range(int(round(t_max / dt))):
        state, spiked = lif_step(state, I, dt, params)
        if spiked:
            return state.spike_times[0]
    return math.inf


def synapse_kernel(s: float, params: SynapseParams) -> float:
    """Unit-weight current ``s`` seconds after a presynaptic spike (zero before it)."""
    if s < 0:
        return 0.0
    return params.I_0 * (math.exp(-s / params.tau_m) - math.exp(-s / params.tau_s))


def synapse_current(
    w: float,
    params: SynapseParams,
    spike_times: Iterable[float],
    t: float,
    horizon: float | None = None,
) -> float:
    """Summed response at time ``t`` to every presynaptic spike at or before ``t``.

    Spikes older than ``horizon`` (default ``10 * tau_m``) are ignored.
    """
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    if horizon is None:
        horizon = 10 * params.tau_m
    total = 0.0
    for ts in spike_times:
        s = t - ts
        if 0 <= s <= horizon:
            total += synapse_kernel(s, params)
    return w * total


def kernel_peak_time(params: SynapseParams) -> float:
    """Delay after a spike at which the synaptic current peaks."""
    tm, ts = params.tau_m, params.tau_s
    return tm * ts / (tm - ts) * math.log(tm / ts)
