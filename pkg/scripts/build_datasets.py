"""Rebuild the bundled UCI dataset files in their canonical text layouts.

The sandbox this project was set up in had no route to the UCI archive, so the
files were regenerated from redistributed copies of the same records:

* Iris, Wine: the CSVs shipped inside scikit-learn.
* Wisconsin (original, 699 records): R's ``MASS::biopsy`` as packaged by
  ``pydataset`` (``resources/rdata/csv/MASS/biopsy.csv``).
* Heart (statlog, 270 records): the KEEL ``heart.dat`` shipped in ``keel_ds``.
  KEEL stores ``oldpeak`` multiplied by ten; it is divided back here.

Usage::

    python scripts/build_datasets.py --biopsy PATH --keel-heart PATH [--out DIR]

Prints the SHA-256 of each written file so ``datasets/SHA256SUMS`` can be
refreshed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
from pathlib import Path

import sklearn

IRIS_NAMES = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]


def _sklearn_csv(name: str) -> list[list[str]]:
    path = Path(sklearn.__file__).parent / "datasets" / "data" / name
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[1:]


def build_iris(out: Path) -> Path:
    lines = [",".join(r[:4] + [IRIS_NAMES[int(r[4])]]) for r in _sklearn_csv("iris.csv")]
    dest = out / "iris.data"
    dest.write_text("\n".join(lines) + "\n")
    return dest


def build_wine(out: Path) -> Path:
    lines = [",".join([str(int(r[13]) + 1)] + r[:13]) for r in _sklearn_csv("wine_data.csv")]
    dest = out / "wine.data"
    dest.write_text("\n".join(lines) + "\n")
    return dest


def build_wisconsin(biopsy: Path, out: Path) -> Path:
    with open(biopsy, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    lines = []
    for r in rows:
        feats = ["?" if v == "NA" else v for v in r[2:11]]
        label = {"benign": "2", "malignant": "4"}[r[11]]
        lines.append(",".join([r[1]] + feats + [label]))
    dest = out / "breast-cancer-wisconsin.data"
    dest.write_text("\n".join(lines) + "\n")
    return dest


def build_heart(keel_heart: Path, out: Path) -> Path:
    lines = []
    for raw in keel_heart.read_text().splitlines():
        if not raw.strip() or raw.startswith("@"):
            continue
        vals = [float(v) for v in raw.split(",")]
        vals[9] /= 10.0
        feats = " ".join(f"{v:.1f}" for v in vals[:13])
        lines.append(f"{feats} {int(vals[13])}")
    dest = out / "heart.dat"
    dest.write_text("\n".join(lines) + "\n")
    return dest


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--biopsy", type=Path, required=True)
    ap.add_argument("--keel-heart", type=Path, required=True)
    ap.add_argument("--out", type=Path, default=Path(__file__).parents[1] / "src/shlsnn/datasets")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    written = [
        build_iris(args.out),
        build_wisconsin(args.biopsy, args.out),
        build_wine(args.out),
        build_heart(args.keel_heart, args.out),
    ]
    sums = []
    for path in written:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        sums.append(f"{digest}  {path.name}")
        print(sums[-1])
    (args.out / "SHA256SUMS").write_text("\n".join(sums) + "\n")


if __name__ == "__main__":
    main()
