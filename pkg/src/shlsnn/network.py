"""Two-layer network: training with bias supervision and the transient recognition test.

Input neurons receive the encoded constant currents; every input neuron
excites every output neuron, and output neurons inhibit each other pairwise.
During training a negative bias current is injected into every output neuron
except the one for the sample's class. Membrane potentials, synaptic traces
and pairing state are reset between samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .data import Dataset, compute_stats
from .dynamics import EXCITATORY, INHIBITORY, NeuronParams, SimulationFault, SynapseParams
from .encoding import EncoderConfig, encode_samples, normalize_array
from .plasticity import LearningParams, init_weights

OUTCOMES = ("correct", "wrong-spike", "no-spike", "multi-spike")


@dataclass(frozen=True)
class NetworkConfig:
    encoder: EncoderConfig
    n_features: int
    n_outputs: int
    neuron_in: NeuronParams = NeuronParams()
    neuron_out: NeuronParams = NeuronParams()
    excitatory: SynapseParams = EXCITATORY
    inhibitory: SynapseParams = INHIBITORY
    lateral_weight: float = -3000.0
    bias: float = -3e-9
    dt: float = 0.1e-3

    def __post_init__(self):
        if self.n_outputs < 1:
            raise ValueError(f"need at least one output neuron, got {self.n_outputs}")
        if self.n_features < 1:
            raise ValueError(f"need at least one feature, got {self.n_features}")
        if self.bias > 0:
            raise ValueError(f"supervision bias must be <= 0, got {self.bias}")
        if self.lateral_weight > 0:
            raise ValueError(f"lateral weight must be <= 0, got {self.lateral_weight}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")

    @property
    def n_inputs(self) -> int:
        return self.n_features * self.encoder.n_transforms


@dataclass(frozen=True)
class TrainingSchedule:
    epochs: int
    train_order: tuple[int, ...]
    exposure: float = 100e-3
    seed: int = 0
    idle: float = 0.0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if not self.exposure > 0:
            raise ValueError(f"exposure must be > 0, got {self.exposure}")
        if self.idle < 0:
            raise ValueError(f"idle must be >= 0, got {self.idle}")


@dataclass(frozen=True)
class Topology:
    n_input: int
    n_output: int
    n_excitatory: int
    n_lateral: int

    @property
    def n_neurons(self) -> int:
        return self.n_input + self.n_output


@dataclass
class TrainingResult:
    weights: np.ndarray
    snapshots: list[np.ndarray] = field(default_factory=list)


@dataclass
class RecognitionResult:
    outcomes: list[str]
    spike_counts: np.ndarray

    @property
    def accuracy(self) -> float:
        if not self.outcomes:
            return 0.0
        return 100.0 * self.outcomes.count("correct") / len(self.outcomes)

    def tally(self) -> dict[str, int]:
        return {name: self.outcomes.count(name) for name in OUTCOMES}


def build_topology(config: NetworkConfig) -> Topology:
    m, n = config.n_inputs, config.n_outputs
    return Topology(n_input=m, n_output=n, n_excitatory=m * n, n_lateral=n * (n - 1))


def input_currents(dataset: Dataset, encoder: EncoderConfig) -> np.ndarray:
    """Samples x input-neuron currents, normalized over the whole dataset."""
    x = normalize_array(dataset.features, compute_stats(dataset))
    return encode_samples(x, encoder)


def pack_params(config: NetworkConfig, exposure: float, learning: LearningParams | None = None) -> np.ndarray:
    lp = learning or LearningParams()
    n_steps = int(round(exposure / config.dt))
    vals = {
        "dt": config.dt,
        "n_steps": float(n_steps),
        "c_in": config.neuron_in.C,
        "g_in": config.neuron_in.g,
        "el_in": config.neuron_in.E_l,
        "vt_in": config.neuron_in.V_t,
        "c_out": config.neuron_out.C,
        "g_out": config.neuron_out.g,
        "el_out": config.neuron_out.E_l,
        "vt_out": config.neuron_out.V_t,
        "exc_i0": config.excitatory.I_0,
        "exc_tau_m": config.excitatory.tau_m,
        "exc_tau_s": config.excitatory.tau_s,
        "inh_i0": config.inhibitory.I_0,
        "inh_tau_m": config.inhibitory.tau_m,
        "inh_tau_s": config.inhibitory.tau_s,
        "lateral_weight": config.lateral_weight,
        "a_up": lp.a_up,
        "a_down": lp.a_down,
        "mu": lp.mu,
        "tau_up": lp.tau_up,
        "tau_down": lp.tau_down,
        "w_max": lp.w_max,
    }
    return np.array([vals[k] for k in kernels.PARAM_NAMES], dtype=np.float64)


def expose(
    currents: np.ndarray,
    weights: np.ndarray,
    bias: np.ndarray,
    params: np.ndarray,
    learn: bool,
    record: bool = False,
    run=None,
):
    """Run one sample presentation from rest.

    Returns ``(spike_counts, rec)`` where ``rec`` is ``None`` unless ``record``;
    when learning, ``weights`` is modified in place.
    """
    run = run or kernels.run_exposure
    if not (np.all(np.isfinite(currents)) and np.all(np.isfinite(bias))):
        raise SimulationFault("non-finite input or bias current")
    m, n = weights.shape
    counts = np.zeros(m + n, dtype=np.int64)
    rec = np.zeros((m + n, int(params[1])), dtype=np.int32) if record else None
    status = run(
        np.ascontiguousarray(currents, dtype=np.float64),
        weights,
        np.ascontiguousarray(bias, dtype=np.float64),
        params,
        bool(learn),
        counts,
        rec,
    )
    if status != 0:
        raise SimulationFault("membrane potential became non-finite")
    return counts, rec


def spike_trains(counts: np.ndarray, rec: np.ndarray, dt: float) -> list[list[float]]:
    return [[int(k) * dt for k in rec[r, : counts[r]]] for r in range(rec.shape[0])]


def train_currents(
    currents: np.ndarray,
    labels: np.ndarray,
    config: NetworkConfig,
    schedule: TrainingSchedule,
    learning: LearningParams,
    weights: np.ndarray | None = None,
) -> TrainingResult:
    """Train on pre-encoded inputs; ``snapshots[e]`` holds the weights after epoch ``e``."""
    m, n = config.n_inputs, config.n_outputs
    if currents.shape[1] != m:
        raise ValueError(f"expected {m} input currents per sample, got {currents.shape[1]}")
    if weights is None:
        weights = init_weights(
            (m, n), learning.init_fraction, learning.w_max, schedule.seed, spread=learning.init_spread
        )
    w = np.array(weights, dtype=np.float64, order="C", copy=True)
    if w.shape != (m, n):
        raise ValueError(f"weights must be {m}x{n}, got {w.shape}")
    params = pack_params(config, schedule.exposure, learning)
    idle_params = pack_params(config, schedule.idle, learning) if schedule.idle > 0 else None
    idle_in = np.zeros(m)
    idle_bias = np.zeros(n)

    snapshots = [w.copy()]
    for epoch in range(schedule.epochs):
        for idx in schedule.train_order:
            label = int(labels[idx])
            if not 1 <= label <= n:
                raise ValueError(f"sample {idx} has label {label} outside 1..{n}")
            bias = np.full(n, config.bias)
            bias[label - 1] = 0.0
            try:
                expose(currents[idx], w, bias, params, learn=True)
                if idle_params is not None:
                    expose(idle_in, w, idle_bias, idle_params, learn=True)
            except SimulationFault as exc:
                raise SimulationFault(f"epoch {epoch + 1}, sample {idx}: {exc}") from None
        snapshots.append(w.copy())
    return TrainingResult(weights=w, snapshots=snapshots)


def train(
    dataset: Dataset,
    config: NetworkConfig,
    schedule: TrainingSchedule,
    learning: LearningParams,
    weights: np.ndarray | None = None,
) -> TrainingResult:
    currents = input_currents(dataset, config.encoder)
    return train_currents(currents, dataset.labels, config, schedule, learning, weights)


def classify(counts: np.ndarray, label: int) -> str:
    fired = np.flatnonzero(counts > 0)
    if fired.size == 0:
        return "no-spike"
    if fired.size > 1:
        return "multi-spike"
    return "correct" if fired[0] == label - 1 else "wrong-spike"


def test_currents(
    currents: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    config: NetworkConfig,
    exposure: float = 100e-3,
    bias: float = 0.0,
) -> RecognitionResult:
    """Transient recognition test. ``bias`` exists only to probe supervision leakage."""
    m, n = config.n_inputs, config.n_outputs
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.shape != (m, n):
        raise ValueError(f"weights must be {m}x{n}, got {w.shape}")
    params = pack_params(config, exposure)
    out_counts = np.zeros((currents.shape[0], n), dtype=np.int64)
    outcomes = []
    for s in range(currents.shape[0]):
        b = np.zeros(n)
        if bias:
            b[:] = bias
            b[int(labels[s]) - 1] = 0.0
        counts, _ = expose(currents[s], w, b, params, learn=False)
        out_counts[s] = counts[m:]
        outcomes.append(classify(counts[m:], int(labels[s])))
    return RecognitionResult(outcomes=outcomes, spike_counts=out_counts)


test_currents.__test__ = False


def test(
    dataset: Dataset, weights: np.ndarray, config: NetworkConfig, exposure: float = 100e-3
) -> RecognitionResult:
    currents = input_currents(dataset, config.encoder)
    return test_currents(currents, dataset.labels, weights, config, exposure)


test.__test__ = False


def with_lateral(config: NetworkConfig, lateral_weight: float) -> NetworkConfig:
    return replace(config, lateral_weight=lateral_weight)
