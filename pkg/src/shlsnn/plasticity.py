"""Saturating supervised-Hebbian weight updates and weight-matrix storage."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class LearningParams:
    a_up: float = 5.0
    a_down: float = -10.0
    mu: float = 2.0
    tau_up: float = 10e-3
    tau_down: float = 20e-3
    w_max: float = 500.0
    init_fraction: float = 0.4
    init_spread: float = 0.1

    def __post_init__(self):
        if not self.a_up > 0:
            raise ValueError(f"a_up must be > 0, got {self.a_up}")
        if not self.a_down < 0:
            raise ValueError(f"a_down must be < 0, got {self.a_down}")
        if not self.mu > 1:
            raise ValueError(f"mu must be > 1, got {self.mu}")
        if not (self.tau_up > 0 and self.tau_down > 0):
            raise ValueError("STDP time constants must be > 0")
        if not self.w_max > 0:
            raise ValueError(f"w_max must be > 0, got {self.w_max}")
        if not 0 <= self.init_fraction <= 1:
            raise ValueError(f"init_fraction must lie in [0, 1], got {self.init_fraction}")
        if self.init_spread < 0:
            raise ValueError(f"init_spread must be >= 0, got {self.init_spread}")


def delta_w(w: float, dt: float, params: LearningParams) -> float:
    """Weight change for one pre/post pairing with ``dt = t_post - t_pre``.

    Potentiation shrinks as ``w`` approaches ``w_max`` and depression as ``w``
    approaches zero. ``dt == 0`` gives no change.
    """
    if dt > 0:
        return params.a_up * math.pow(1 - w / params.w_max, params.mu) * math.exp(-dt / params.tau_up)
    if dt < 0:
        return params.a_down * math.pow(w / params.w_max, params.mu) * math.exp(dt / params.tau_down)
    return 0.0


def clamp(w: float, w_max: float) -> float:
    return min(max(w, 0.0), w_max)


def apply_pairing(
    pre: Sequence[float], post: Sequence[float], w: float, params: LearningParams
) -> float:
    """Replay one synapse's spike trains and return the final weight.

    Nearest-neighbour pairing where each spike is used at most once per
    direction: a post spike potentiates with the latest unpaired earlier pre
    spike, a pre spike depresses with the latest unpaired earlier post spike.
    Simultaneous spikes are ordered post-first and never pair with each other.
    """
    events = sorted([(t, 0) for t in post] + [(t, 1) for t in pre])
    last_pre = last_post = None
    pre_free = post_free = False
    for t, kind in events:
        if kind == 0:
            if last_pre is not None and pre_free and t > last_pre:
                w = clamp(w + delta_w(w, t - last_pre, params), params.w_max)
                pre_free = False
            last_post, post_free = t, True
        else:
            if last_post is not None and post_free and t > last_post:
                w = clamp(w + delta_w(w, last_post - t, params), params.w_max)
                post_free = False
            last_pre, pre_free = t, True
    return w


def init_weights(
    shape: tuple[int, int],
    mean_fraction: float,
    w_max: float,
    seed,
    spread: float = 0.1,
) -> np.ndarray:
    """Uniform weights on ``(mean_fraction +- spread) * w_max``, clamped to ``[0, w_max]``."""
    if len(shape) != 2 or min(shape) < 1:
        raise ValueError(f"invalid weight shape {shape}")
    rng = np.random.default_rng(seed)
    lo = (mean_fraction - spread) * w_max
    hi = (mean_fraction + spread) * w_max
    w = rng.uniform(lo, hi, size=shape) if spread > 0 else np.full(shape, mean_fraction * w_max)
    return np.clip(w, 0.0, w_max)


def save_weights(path, weights: np.ndarray, w_max: float) -> None:
    """Write ``rows cols w_max`` then one space-separated row per input neuron."""
    w = np.asarray(weights, dtype=float)
    rows, cols = w.shape
    lines = [f"{rows} {cols} {w_max!r}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in w]
    Path(path).write_text("\n".join(lines) + "\n")


def load_weights(path) -> tuple[np.ndarray, float]:
    text = Path(path).read_text().split("\n")
    head = text[0].split()
    if len(head) != 3:
        raise ValueError(f"{path}: header must be 'rows cols w_max'")
    rows, cols, w_max = int(head[0]), int(head[1]), float(head[2])
    body = [ln for ln in text[1:] if ln.strip()]
    if len(body) != rows:
        raise ValueError(f"{path}: expected {rows} rows, found {len(body)}")
    w = np.array([[float(v) for v in ln.split()] for ln in body], dtype=float)
    if w.shape != (rows, cols):
        raise ValueError(f"{path}: expected {rows}x{cols} weights, got {w.shape}")
    return w, w_max
