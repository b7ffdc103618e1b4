"""Current-space evaluation of learned weights without running the dynamics.

A sample's input currents are gated by the input-layer threshold (a neuron
driven at or below ``I_th`` never fires) and multiplied through the weights,
giving one aggregate current per output neuron. Classification is read off as
the strict argmax of that vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Robustness:
    distances: np.ndarray
    metric: float
    scale: float


@dataclass
class CurrentSpaceReport:
    points: np.ndarray
    labels: np.ndarray
    class_means: np.ndarray
    merit: float
    robustness: Robustness

    def as_dict(self) -> dict:
        return {
            "merit": self.merit,
            "robustness_metric": self.robustness.metric,
            "d": self.robustness.distances.tolist(),
            "scale": self.robustness.scale,
            "class_means": self.class_means.tolist(),
        }


def gate(currents: np.ndarray, i_th: float) -> np.ndarray:
    """Zero every input current that does not strictly exceed ``i_th``."""
    c = np.asarray(currents, dtype=float)
    return np.where(c > i_th, c, 0.0)


def project(currents: np.ndarray, weights: np.ndarray, i_th: float) -> np.ndarray:
    """Current-space coordinates for one sample (M,) or a batch (S, M)."""
    c = np.asarray(currents, dtype=float)
    w = np.asarray(weights, dtype=float)
    if c.shape[-1] != w.shape[0]:
        raise ValueError(f"{c.shape[-1]} input currents vs {w.shape[0]} weight rows")
    return gate(c, i_th) @ w


def correct_mask(points: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """True where the true class's component beats every other component (ties fail)."""
    p = np.asarray(points, dtype=float)
    idx = np.asarray(labels, dtype=int) - 1
    own = np.take_along_axis(p, idx[:, None], axis=1)[:, 0]
    rivals = p.copy()
    np.put_along_axis(rivals, idx[:, None], -np.inf, axis=1)
    return own > rivals.max(axis=1)


def merit_figure(points: np.ndarray, labels: np.ndarray) -> float:
    """Percentage of samples lying in their own class's subspace."""
    p = np.asarray(points)
    if p.shape[0] == 0:
        raise ValueError("merit figure of an empty point set")
    return 100.0 * float(correct_mask(p, labels).mean())


def class_means(points: np.ndarray, labels: np.ndarray, n_classes: int) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    labels = np.asarray(labels, dtype=int)
    means = []
    for j in range(1, n_classes + 1):
        sel = labels == j
        if not sel.any():
            raise ValueError(f"class {j} has no samples")
        means.append(p[sel].mean(axis=0))
    return np.array(means)


def robustness_metric(
    points: np.ndarray, labels: np.ndarray, n_classes: int | None = None, scale: float | None = None
) -> Robustness:
    """Signed distance of each class mean from its nearest decision boundary.

    For classes ``j`` and ``k`` the boundary is the hyperplane ``I_j = I_k``, so
    the distance of mean ``m`` is ``(m_j - m_k) / sqrt(2)``. Distances are
    divided by the largest separation a mean could reach, ``R / sqrt(2)``,
    where ``R`` (``scale``) defaults to the largest component in ``points``.
    The metric is ``100 * min(d)``.
    """
    p = np.asarray(points, dtype=float)
    n = n_classes or p.shape[1]
    means = class_means(p, labels, n)
    if scale is None:
        scale = float(p.max()) if p.size else 0.0
    d_max = scale / math.sqrt(2)
    d = np.empty(n)
    for j in range(n):
        gaps = [(means[j, j] - means[j, k]) / math.sqrt(2) for k in range(n) if k != j]
        d[j] = min(gaps) / d_max if d_max > 0 else 0.0
    return Robustness(distances=d, metric=100.0 * float(d.min()), scale=scale)


def report(
    currents: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    i_th: float,
    scale: float | None = None,
) -> CurrentSpaceReport:
    pts = project(currents, weights, i_th)
    n = weights.shape[1]
    return CurrentSpaceReport(
        points=pts,
        labels=np.asarray(labels),
        class_means=class_means(pts, labels, n),
        merit=merit_figure(pts, labels),
        robustness=robustness_metric(pts, labels, n, scale),
    )


def add_weight_noise(weights: np.ndarray, sigma: float, seed, w_max: float) -> np.ndarray:
    """Independent zero-mean Gaussian perturbation of every weight, clamped to ``[0, w_max]``."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    w = np.asarray(weights, dtype=float)
    if sigma == 0:
        return w.copy()
    rng = np.random.default_rng(seed)
    return np.clip(w + rng.normal(0.0, sigma, size=w.shape), 0.0, w_max)


@dataclass(frozen=True)
class SweepPoint:
    sigma: float
    mean_merit: float
    var_merit: float


def noise_sweep(
    weights: np.ndarray,
    sigmas,
    replicas: int,
    currents: np.ndarray,
    labels: np.ndarray,
    i_th: float,
    w_max: float,
    seed: int = 0,
) -> list[SweepPoint]:
    """Mean and variance of the merit figure over ``replicas`` noisy copies per sigma.

    Replica ``r`` at sigma index ``k`` draws its noise from seed ``(seed, k, r)``.
    """
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    g = gate(currents, i_th)
    labels = np.asarray(labels)
    out = []
    for k, sigma in enumerate(sigmas):
        merits = np.empty(replicas)
        for r in range(replicas):
            w = add_weight_noise(weights, float(sigma), (seed, k, r), w_max)
            merits[r] = merit_figure(g @ w, labels)
        out.append(SweepPoint(float(sigma), float(merits.mean()), float(merits.var())))
    return out


def crossing_sigma(sweep: list[SweepPoint], level: float = 90.0, start: float | None = None) -> float:
    """Sigma at which the mean merit first drops below ``level`` (linear interpolation).

    ``start`` is the noiseless merit; when given it anchors the curve at
    sigma = 0. Returns ``inf`` if the curve never drops below ``level``.
    """
    prev = SweepPoint(0.0, start, 0.0) if start is not None else None
    if prev is not None and prev.mean_merit < level:
        return 0.0
    for pt in sweep:
        if pt.mean_merit < level:
            if prev is None:
                return pt.sigma
            frac = (prev.mean_merit - level) / (prev.mean_merit - pt.mean_merit)
            return prev.sigma + frac * (pt.sigma - prev.sigma)
        prev = pt
    return math.inf


def merit_accuracy_correlation(pairs) -> float:
    """Pearson correlation of (merit, accuracy) pairs."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError("need at least 3 (merit, accuracy) pairs")
    if np.ptp(arr[:, 0]) == 0 or np.ptp(arr[:, 1]) == 0:
        raise ValueError("correlation undefined for a constant series")
    return float(np.corrcoef(arr[:, 0], arr[:, 1])[0, 1])
