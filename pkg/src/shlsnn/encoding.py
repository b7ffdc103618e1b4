"""Population coding of normalized features into constant input currents.

Each feature value is min-max normalized to [0, 1] and then fed through a
bank of sensors (Gaussian RBFs or linear ramps). A dataset with F features and
T sensors per feature drives F*T input neurons, ordered feature-major
(``index = feature * T + sensor``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

LINEAR_SENSORS = ("high", "low", "intermediate", "extreme")
CLAMP_TOL = 1e-9


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class NormalizationStats:
    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.minimum, dtype=float)
        hi = np.asarray(self.maximum, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("min/max must be 1-D arrays of equal length")
        if np.any(hi < lo):
            raise ValueError("max < min for some feature")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)

    @property
    def n_features(self) -> int:
        return self.minimum.shape[0]


@dataclass(frozen=True)
class EncoderConfig:
    """Sensor bank shared by every feature.

    ``mode`` is ``"gaussian"`` (``n_rbf`` centres evenly spaced on [0, 1]) or
    ``"linear"`` (an ordered subset of :data:`LINEAR_SENSORS`). ``sigma``
    defaults to half the spacing between RBF centres.
    """

    mode: str
    i_max: float = 4e-9
    n_rbf: int = 0
    sensors: tuple[str, ...] = ()
    sigma: float | None = None

    def __post_init__(self):
        if not self.i_max > 0:
            raise ValueError(f"i_max must be > 0, got {self.i_max}")
        if self.mode == "gaussian":
            if self.n_rbf < 2:
                raise ValueError(f"gaussian coding needs at least 2 RBFs, got {self.n_rbf}")
            if self.sigma is not None and not self.sigma > 0:
                raise ValueError(f"sigma must be > 0, got {self.sigma}")
        elif self.mode == "linear":
            if not self.sensors:
                raise ValueError("linear coding needs at least one sensor")
            bad = [s for s in self.sensors if s not in LINEAR_SENSORS]
            if bad:
                raise ValueError(f"unknown linear sensors {bad}; choose from {LINEAR_SENSORS}")
        else:
            raise ValueError(f"unknown encoder mode {self.mode!r}")

    @classmethod
    def gaussian(cls, n_rbf: int, i_max: float = 4e-9, sigma: float | None = None) -> EncoderConfig:
        return cls(mode="gaussian", i_max=i_max, n_rbf=n_rbf, sigma=sigma)

    @classmethod
    def linear(cls, sensors: Sequence[str], i_max: float = 4e-9) -> EncoderConfig:
        return cls(mode="linear", i_max=i_max, sensors=tuple(s.lower() for s in sensors))

    @property
    def n_transforms(self) -> int:
        return self.n_rbf if self.mode == "gaussian" else len(self.sensors)

    @property
    def centers(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_rbf)

    @property
    def width(self) -> float:
        if self.sigma is not None:
            return self.sigma
        return 1.0 / (2 * (self.n_rbf - 1))

    def with_i_max(self, i_max: float) -> EncoderConfig:
        return EncoderConfig(self.mode, i_max, self.n_rbf, self.sensors, self.sigma)


def compute_stats(features: np.ndarray) -> NormalizationStats:
    """Per-feature min/max over every row of ``features`` (samples x features)."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("need a non-empty samples x features array")
    return NormalizationStats(x.min(axis=0), x.max(axis=0))


def normalize(raw: float, stats: NormalizationStats, index: int) -> float:
    if not 0 <= index < stats.n_features:
        raise IndexError(f"feature index {index} out of range for {stats.n_features} features")
    lo, hi = stats.minimum[index], stats.maximum[index]
    if hi == lo:
        return 0.0
    return float((raw - lo) / (hi - lo))


def normalize_array(features: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.shape[-1] != stats.n_features:
        raise ValueError(f"expected {stats.n_features} features, got {x.shape[-1]}")
    span = stats.maximum - stats.minimum
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (x - stats.minimum) / safe, 0.0)


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < -CLAMP_TOL) or np.any(x > 1 + CLAMP_TOL) or np.any(~np.isfinite(x)):
        raise EncodingError(f"normalized input outside [0, 1]: {x[(x < 0) | (x > 1)]}")
    return np.clip(x, 0.0, 1.0)


def _gaussian_bank(x: np.ndarray, config: EncoderConfig) -> np.ndarray:
    sigma = config.width
    d = x[..., None] - config.centers
    return config.i_max * np.exp(-(d * d) / (2 * sigma * sigma))


def _linear_bank(x: np.ndarray, config: EncoderConfig) -> np.ndarray:
    out = []
    for name in config.sensors:
        if name == "high":
            out.append(config.i_max * x)
        elif name == "low":
            out.append(config.i_max * (1 - x))
        elif name == "intermediate":
            out.append(config.i_max * (1 - 2 * np.abs(x - 0.5)))
        else:
            out.append(config.i_max * 2 * np.abs(x - 0.5))
    return np.stack(out, axis=-1)


def encode_gaussian(x: float, config: EncoderConfig) -> np.ndarray:
    if config.mode != "gaussian":
        raise ValueError("encoder is not in gaussian mode")
    return _gaussian_bank(_check_unit(x), config)


def encode_linear(x: float, config: EncoderConfig) -> np.ndarray:
    if config.mode != "linear":
        raise ValueError("encoder is not in linear mode")
    return _linear_bank(_check_unit(x), config)


def encode(x, config: EncoderConfig) -> np.ndarray:
    """Sensor currents for normalized value(s) ``x``; adds a trailing axis of length T."""
    x = _check_unit(x)
    if config.mode == "gaussian":
        return _gaussian_bank(x, config)
    return _linear_bank(x, config)


def encode_samples(normalized: np.ndarray, config: EncoderConfig) -> np.ndarray:
    """Map a samples x features array of normalized values to samples x (F*T) currents."""
    x = np.asarray(normalized, dtype=float)
    bank = encode(x, config)
    return bank.reshape(x.shape[0], -1)


@dataclass(frozen=True)
class CoverageReport:
    """Where each sensor's current strictly exceeds a threshold on [0, 1]."""

    sensors: tuple[str, ...]
    intervals: tuple[tuple[tuple[float, float], ...], ...]
    gap: float
    overlap: float
    covered: float

    def as_dict(self) -> dict:
        return {
            "sensors": list(self.sensors),
            "intervals": [[list(iv) for iv in ivs] for ivs in self.intervals],
            "gap": self.gap,
            "overlap": self.overlap,
            "covered": self.covered,
        }


def _clip_interval(lo: float, hi: float) -> list[tuple[float, float]]:
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    return [(lo, hi)] if hi > lo else []


def _active_intervals(name: str, ratio: float, config: EncoderConfig, center: float = 0.0):
    # ratio = I_th / I_max; sensor active where current / I_max > ratio
    if name == "high":
        return _clip_interval(ratio, 1.0)
    if name == "low":
        return _clip_interval(0.0, 1.0 - ratio)
    if name == "intermediate":
        return _clip_interval(ratio / 2, 1.0 - ratio / 2)
    if name == "extreme":
        return _clip_interval(0.0, 0.5 - ratio / 2) + _clip_interval(0.5 + ratio / 2, 1.0)
    # gaussian: exp(-(x-mu)^2 / 2 sigma^2) > ratio
    if ratio >= 1.0:
        return []
    if ratio <= 0.0:
        return _clip_interval(0.0, 1.0)
    half = config.width * np.sqrt(2 * np.log(1.0 / ratio))
    return _clip_interval(center - half, center + half)


def coverage_analysis(config: EncoderConfig, i_th: float) -> CoverageReport:
    """Measure how the thresholded sensor bank tiles the normalized input range.

    ``gap`` is the length of [0, 1] no sensor responds to, ``overlap`` the
    length covered by two or more sensors.
    """
    ratio = i_th / config.i_max
    if config.mode == "gaussian":
        names = tuple(f"rbf{k}" for k in range(config.n_rbf))
        intervals = [_active_intervals("rbf", ratio, config, c) for c in config.centers]
    else:
        names = config.sensors
        intervals = [_active_intervals(n, ratio, config) for n in names]

    cuts = sorted({0.0, 1.0, *(p for ivs in intervals for iv in ivs for p in iv)})
    covered = overlap = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        hits = sum(any(lo < mid < hi for lo, hi in ivs) for ivs in intervals)
        if hits >= 1:
            covered += b - a
        if hits >= 2:
            overlap += b - a
    return CoverageReport(
        sensors=tuple(names),
        intervals=tuple(tuple(ivs) for ivs in intervals),
        gap=1.0 - covered,
        overlap=overlap,
        covered=covered,
    )
