"""UCI dataset loading, median imputation and seeded stratified splits."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .encoding import NormalizationStats, compute_stats as _stats_of


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class FormatSpec:
    """How to read one delimited text file.

    ``delimiter=None`` splits on whitespace. ``label_map`` maps the raw label
    token to a class index in ``1..N``.
    """

    label_column: int
    label_map: dict[str, int]
    delimiter: str | None = ","
    drop_columns: tuple[int, ...] = ()
    missing_token: str | None = None


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    class_names: tuple[str, ...] = ()
    missing_mask: np.ndarray | None = field(default=None, compare=False)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_indices(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


@dataclass(frozen=True)
class Split:
    train: tuple[np.ndarray, ...]
    test: np.ndarray
    seed: int

    def training_order(self) -> np.ndarray:
        """Round-robin over classes: first sample of each class, then the second, ..."""
        order = []
        for k in range(max(len(t) for t in self.train)):
            order.extend(int(t[k]) for t in self.train if k < len(t))
        return np.array(order, dtype=int)

    def as_dict(self) -> dict:
        return {"seed": self.seed, "train": [t.tolist() for t in self.train]}


BUILTIN = {
    "iris": (
        "iris.data",
        FormatSpec(
            label_column=4,
            label_map={"Iris-setosa": 1, "Iris-versicolor": 2, "Iris-virginica": 3},
        ),
    ),
    "wisconsin": (
        "breast-cancer-wisconsin.data",
        FormatSpec(label_column=10, label_map={"2": 1, "4": 2}, drop_columns=(0,), missing_token="?"),
    ),
    "wine": ("wine.data", FormatSpec(label_column=0, label_map={"1": 1, "2": 2, "3": 3})),
    "heart": ("heart.dat", FormatSpec(label_column=13, label_map={"1": 1, "2": 2}, delimiter=None)),
}


def _split(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        return line.split()
    return [tok.strip() for tok in line.split(delimiter)]


def load(path, spec: FormatSpec, name: str | None = None) -> Dataset:
    """Parse ``path``; missing values are replaced by the feature's median over present values."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"{path}: cannot read ({exc})") from exc

    rows, labels, width = [], [], None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        toks = _split(line, spec.delimiter)
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise DataError(f"{path}:{lineno}: expected {width} columns, found {len(toks)}")
        label = toks[spec.label_column]
        if label not in spec.label_map:
            raise DataError(f"{path}:{lineno}: unknown label {label!r}")
        drop = {c % width for c in spec.drop_columns} | {spec.label_column % width}
        feats = []
        for c, tok in enumerate(toks):
            if c in drop:
                continue
            if spec.missing_token is not None and tok == spec.missing_token:
                feats.append(np.nan)
                continue
            try:
                feats.append(float(tok))
            except ValueError:
                raise DataError(f"{path}:{lineno}: column {c} is not numeric: {tok!r}") from None
        rows.append(feats)
        labels.append(spec.label_map[label])
    if not rows:
        raise DataError(f"{path}: no samples")

    x = np.array(rows, dtype=float)
    missing = np.isnan(x)
    if missing.any():
        for col in np.flatnonzero(missing.any(axis=0)):
            present = x[~missing[:, col], col]
            if present.size == 0:
                raise DataError(f"{path}: feature {col} has no values")
            x[missing[:, col], col] = np.median(present)

    inverse = sorted(spec.label_map.items(), key=lambda kv: kv[1])
    return Dataset(
        name=name or path.stem,
        features=x,
        labels=np.array(labels, dtype=int),
        n_classes=max(spec.label_map.values()),
        class_names=tuple(k for k, _ in inverse),
        missing_mask=missing if missing.any() else None,
    )


def save(dataset: Dataset, path, spec: FormatSpec) -> None:
    """Write ``dataset`` so that :func:`load` with the same spec reads it back unchanged.

    Dropped columns (e.g. record IDs) are written as zeros.
    """
    inverse = {v: k for k, v in spec.label_map.items()}
    width = dataset.n_features + 1 + len(spec.drop_columns)
    drop = {c % width for c in spec.drop_columns}
    label_col = spec.label_column % width
    sep = " " if spec.delimiter is None else spec.delimiter
    lines = []
    for feats, label in zip(dataset.features, dataset.labels):
        it = iter(feats)
        toks = []
        for c in range(width):
            if c == label_col:
                toks.append(inverse[int(label)])
            elif c in drop:
                toks.append("0")
            else:
                toks.append(repr(float(next(it))))
        lines.append(sep.join(toks))
    Path(path).write_text("\n".join(lines) + "\n")


def _checksums() -> dict[str, str]:
    text = resources.files("shlsnn.datasets").joinpath("SHA256SUMS").read_text()
    out = {}
    for line in text.splitlines():
        if line.strip():
            digest, fname = line.split()
            out[fname] = digest
    return out


def builtin_path(name: str) -> Path:
    if name not in BUILTIN:
        raise DataError(f"unknown dataset {name!r}; choose from {sorted(BUILTIN)}")
    return Path(str(resources.files("shlsnn.datasets").joinpath(BUILTIN[name][0])))


def verify_checksum(name: str) -> None:
    path = builtin_path(name)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    expected = _checksums()[path.name]
    if digest != expected:
        raise DataError(f"{path}: checksum mismatch ({digest} != {expected})")


def load_builtin(name: str) -> Dataset:
    verify_checksum(name)
    return load(builtin_path(name), BUILTIN[name][1], name=name)


def compute_stats(dataset: Dataset) -> NormalizationStats:
    return _stats_of(dataset.features)


def stratified_split(dataset: Dataset, per_class: int, seed: int) -> Split:
    """Draw ``per_class`` training samples from every class without replacement.

    The test set is the whole dataset.
    """
    rng = np.random.default_rng(seed)
    train = []
    for label in range(1, dataset.n_classes + 1):
        idx = dataset.class_indices(label)
        if per_class > idx.size:
            raise DataError(f"class {label} has {idx.size} samples, asked for {per_class}")
        train.append(rng.permutation(idx)[:per_class])
    return Split(train=tuple(train), test=np.arange(dataset.n_samples), seed=seed)
