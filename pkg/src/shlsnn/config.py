"""Experiment configuration files.

A config is plain text with one ``section.key = value`` per line; ``#`` starts
a comment. Physical quantities must carry a unit suffix (``4nA``, ``100ms``,
``-70mV``, ``300pF``, ``30nS``) and are converted to SI on load. Keys that are
not given take the defaults in :data:`SCHEMA`. A JSON report written by the
CLI is also accepted as a config: its ``config`` echo is read back.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import NeuronParams, SynapseParams
from .encoding import EncoderConfig
from .plasticity import LearningParams


class ConfigError(ValueError):
    pass


UNITS = {
    "current": {"A": 1.0, "mA": 1e-3, "uA": 1e-6, "nA": 1e-9, "pA": 1e-12, "fA": 1e-15},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6},
    "voltage": {"V": 1.0, "mV": 1e-3, "uV": 1e-6},
    "capacitance": {"F": 1.0, "uF": 1e-6, "nF": 1e-9, "pF": 1e-12},
    "conductance": {"S": 1.0, "mS": 1e-3, "uS": 1e-6, "nS": 1e-9},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]+)\s*$")

# key -> (kind, default). A default of None marks a required key; "" an optional one.
SCHEMA: dict[str, tuple[str, str | None]] = {
    "experiment.name": ("str", ""),
    "dataset.name": ("str", None),
    "dataset.path": ("str", ""),
    "dataset.per_class": ("int", None),
    "encoder.mode": ("str", None),
    "encoder.rbf_count": ("int", "0"),
    "encoder.sensors": ("list_str", ""),
    "encoder.i_max": ("current", "4nA"),
    "encoder.sigma": ("float", ""),
    "neuron.C": ("capacitance", "300pF"),
    "neuron.g": ("conductance", "30nS"),
    "neuron.E_l": ("voltage", "-70mV"),
    "neuron.V_t": ("voltage", "20mV"),
    "neuron.V_t_out": ("voltage", "20mV"),
    "synapse.exc_I0": ("current", "10pA"),
    "synapse.exc_tau_m": ("time", "10ms"),
    "synapse.exc_tau_s": ("time", "2.5ms"),
    "synapse.inh_I0": ("current", "0.1nA"),
    "synapse.inh_tau_m": ("time", "50ms"),
    "synapse.inh_tau_s": ("time", "2.5ms"),
    "network.lateral_weight": ("float", "-3000"),
    "network.bias": ("current", "-3nA"),
    "network.dt": ("time", "0.1ms"),
    "learning.a_up": ("float", "5"),
    "learning.a_down": ("float", "-10"),
    "learning.mu": ("float", "2"),
    "learning.tau_up": ("time", "10ms"),
    "learning.tau_down": ("time", "20ms"),
    "learning.w_max": ("float", "500"),
    "learning.init_fraction": ("float", "0.4"),
    "learning.init_spread": ("float", "0.1"),
    "schedule.epochs": ("int", "15"),
    "schedule.exposure": ("time", "100ms"),
    "schedule.test_exposure": ("time", "100ms"),
    "schedule.idle": ("time", "0ms"),
    "run.count": ("int", "10"),
    "run.seed": ("int", "0"),
    "expect.accuracy": ("float", ""),
    "expect.tolerance": ("float", ""),
    "design.ratio_min": ("float", "0.2"),
    "design.ratio_max": ("float", "0.9"),
    "design.steps": ("int", "15"),
    "noise.sigmas": ("list_float", "10,25,50,75,100,150,200,250,300"),
    "noise.replicas": ("int", "200"),
    "noise.system_a_epoch": ("int", "1"),
    "noise.level": ("float", "90"),
    "noise.correlation_sigma": ("float", "100"),
    "noise.correlation_replicas": ("int", "10"),
}


def parse_quantity(text: str, kind: str, key: str = "value") -> float:
    """``"4nA"`` -> ``4e-9``. The unit must belong to ``kind``."""
    m = _QUANTITY.match(text)
    if not m:
        raise ConfigError(f"{key}: expected a {kind} with a unit suffix (e.g. {_example(kind)}), got {text!r}")
    number, unit = m.groups()
    table = UNITS[kind]
    if unit not in table:
        raise ConfigError(f"{key}: unit {unit!r} is not a {kind} unit; use one of {sorted(table)}")
    return float(number) * table[unit]


def _example(kind: str) -> str:
    return {"current": "4nA", "time": "100ms", "voltage": "20mV", "capacitance": "300pF", "conductance": "30nS"}[kind]


def _convert(key: str, kind: str, raw: str):
    raw = raw.strip()
    if kind in UNITS:
        return parse_quantity(raw, kind, key)
    if kind == "str":
        return raw
    if kind == "list_str":
        return tuple(s.strip().lower() for s in raw.split(",") if s.strip())
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return None if raw == "" else float(raw)
        if kind == "list_float":
            return tuple(float(s) for s in raw.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected {kind}, got {raw!r}") from None
    raise AssertionError(kind)


def parse_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Raw ``key -> value`` strings, checked against :data:`SCHEMA`."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_raw(path) -> dict[str, str]:
    """Raw values from a config file or from the ``config`` echo of a JSON report."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileNotFoundError(f"{path}: cannot read config ({exc})") from exc
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            echo = json.loads(text)["config"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"{path}: not a report with a 'config' echo ({exc})") from None
        return parse_text("\n".join(f"{k} = {v}" for k, v in echo.items()), str(path))
    return parse_text(text, str(path))


@dataclass(frozen=True)
class DesignSweep:
    ratio_min: float
    ratio_max: float
    steps: int

    def ratios(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.ratio_min])
        return np.linspace(self.ratio_min, self.ratio_max, self.steps)


@dataclass(frozen=True)
class NoiseStudy:
    sigmas: tuple[float, ...]
    replicas: int
    system_a_epoch: int
    level: float
    correlation_sigma: float
    correlation_replicas: int


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dataset: str
    dataset_path: str
    per_class: int
    encoder: EncoderConfig
    neuron_in: NeuronParams
    neuron_out: NeuronParams
    excitatory: SynapseParams
    inhibitory: SynapseParams
    lateral_weight: float
    bias: float
    dt: float
    learning: LearningParams
    epochs: int
    exposure: float
    test_exposure: float
    idle: float
    runs: int
    seed: int
    expect_accuracy: float | None
    expect_tolerance: float | None
    design: DesignSweep
    noise: NoiseStudy
    echo: dict[str, str]


def build(raw: dict[str, str], name: str = "") -> ExperimentConfig:
    """Validate raw values (defaults filled in) into an :class:`ExperimentConfig`."""
    merged: dict[str, str] = {}
    for key, (kind, default) in SCHEMA.items():
        if key in raw:
            merged[key] = raw[key]
        elif default is None:
            raise ConfigError(f"{key}: required key is missing")
        else:
            merged[key] = default
    if not merged["experiment.name"]:
        merged["experiment.name"] = name
    v = {key: _convert(key, SCHEMA[key][0], merged[key]) for key in SCHEMA}

    def section(label, fn):
        try:
            return fn()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{label}: {exc}") from None

    mode = v["encoder.mode"].lower()
    if mode in ("gaussian", "rbf"):
        encoder = section("encoder", lambda: EncoderConfig.gaussian(v["encoder.rbf_count"], v["encoder.i_max"], v["encoder.sigma"]))
    elif mode == "linear":
        encoder = section("encoder", lambda: EncoderConfig.linear(v["encoder.sensors"], v["encoder.i_max"]))
    else:
        raise ConfigError(f"encoder.mode: expected 'gaussian' or 'linear', got {mode!r}")

    def neuron(vt):
        return NeuronParams(C=v["neuron.C"], g=v["neuron.g"], E_l=v["neuron.E_l"], V_t=vt)

    neuron_in = section("neuron", lambda: neuron(v["neuron.V_t"]))
    neuron_out = section("neuron.V_t_out", lambda: neuron(v["neuron.V_t_out"]))
    excitatory = section("synapse.exc", lambda: SynapseParams(v["synapse.exc_I0"], v["synapse.exc_tau_m"], v["synapse.exc_tau_s"]))
    inhibitory = section(
        "synapse.inh",
        lambda: SynapseParams(v["synapse.inh_I0"], v["synapse.inh_tau_m"], v["synapse.inh_tau_s"], "inhibitory"),
    )
    learning = section(
        "learning",
        lambda: LearningParams(
            a_up=v["learning.a_up"],
            a_down=v["learning.a_down"],
            mu=v["learning.mu"],
            tau_up=v["learning.tau_up"],
            tau_down=v["learning.tau_down"],
            w_max=v["learning.w_max"],
            init_fraction=v["learning.init_fraction"],
            init_spread=v["learning.init_spread"],
        ),
    )

    checks = [
        ("dataset.per_class", v["dataset.per_class"] >= 1, "must be >= 1"),
        ("network.lateral_weight", v["network.lateral_weight"] <= 0, "must be <= 0"),
        ("network.bias", v["network.bias"] <= 0, "must be <= 0"),
        ("network.dt", v["network.dt"] > 0, "must be > 0"),
        ("schedule.epochs", v["schedule.epochs"] >= 1, "must be >= 1"),
        ("schedule.exposure", v["schedule.exposure"] > 0, "must be > 0"),
        ("schedule.test_exposure", v["schedule.test_exposure"] > 0, "must be > 0"),
        ("schedule.idle", v["schedule.idle"] >= 0, "must be >= 0"),
        ("run.count", v["run.count"] >= 1, "must be >= 1"),
        ("run.seed", v["run.seed"] >= 0, "must be >= 0"),
        ("design.ratio_min", 0 < v["design.ratio_min"] < 1, "must lie in (0, 1)"),
        ("design.ratio_max", 0 < v["design.ratio_max"] < 1, "must lie in (0, 1)"),
        ("design.ratio_max", v["design.ratio_max"] >= v["design.ratio_min"], "must be >= design.ratio_min"),
        ("design.steps", v["design.steps"] >= 1, "must be >= 1"),
        ("noise.sigmas", all(s >= 0 for s in v["noise.sigmas"]) and len(v["noise.sigmas"]) > 0, "need one or more sigmas >= 0"),
        ("noise.replicas", v["noise.replicas"] >= 1, "must be >= 1"),
        ("noise.system_a_epoch", 0 <= v["noise.system_a_epoch"] <= v["schedule.epochs"], "must lie in 0..schedule.epochs"),
        ("noise.correlation_sigma", v["noise.correlation_sigma"] is not None and v["noise.correlation_sigma"] >= 0, "must be >= 0"),
        ("noise.correlation_replicas", v["noise.correlation_replicas"] >= 2, "must be >= 2"),
        ("expect.tolerance", v["expect.tolerance"] is None or v["expect.tolerance"] >= 0, "must be >= 0"),
    ]
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(f"{key}: {msg} (got {merged[key]!r})")
    if (v["expect.accuracy"] is None) != (v["expect.tolerance"] is None):
        raise ConfigError("expect.accuracy and expect.tolerance must be given together")

    return ExperimentConfig(
        name=v["experiment.name"],
        dataset=v["dataset.name"],
        dataset_path=v["dataset.path"],
        per_class=v["dataset.per_class"],
        encoder=encoder,
        neuron_in=neuron_in,
        neuron_out=neuron_out,
        excitatory=excitatory,
        inhibitory=inhibitory,
        lateral_weight=v["network.lateral_weight"],
        bias=v["network.bias"],
        dt=v["network.dt"],
        learning=learning,
        epochs=v["schedule.epochs"],
        exposure=v["schedule.exposure"],
        test_exposure=v["schedule.test_exposure"],
        idle=v["schedule.idle"],
        runs=v["run.count"],
        seed=v["run.seed"],
        expect_accuracy=v["expect.accuracy"],
        expect_tolerance=v["expect.tolerance"],
        design=DesignSweep(v["design.ratio_min"], v["design.ratio_max"], v["design.steps"]),
        noise=NoiseStudy(
            sigmas=v["noise.sigmas"],
            replicas=v["noise.replicas"],
            system_a_epoch=v["noise.system_a_epoch"],
            level=v["noise.level"],
            correlation_sigma=v["noise.correlation_sigma"],
            correlation_replicas=v["noise.correlation_replicas"],
        ),
        echo=merged,
    )


def load(path, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    raw = read_raw(path)
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown override key {key!r}")
        raw[key] = value
    return build(raw, name=Path(path).stem)


def bundled(name: str) -> Path:
    """Path of a config shipped with the package, e.g. ``bundled("iris-4linear")``."""
    from importlib import resources

    path = Path(str(resources.files("shlsnn.configs").joinpath(f"{name}.cfg")))
    if not path.exists():
        raise FileNotFoundError(f"no bundled config named {name!r}")
    return path


def derive_seed(master: int, k: int) -> int:
    """Seed of run ``k``: a 63-bit hash of ``(master, k)``."""
    state = np.random.SeedSequence([master, k]).generate_state(1, np.uint64)[0]
    return int(state) >> 1
