"""Labelled delimited datasets (UCR archive layout) and proportional subsampling."""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .kernels import PooledSample
from .stats import LabelVector


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True)
class Dataset:
    pooled: PooledSample
    labels: LabelVector
    source: str = ""
    class_map: dict = field(default_factory=dict)  # original class id -> 1 or 2

    @property
    def m(self) -> int:
        return self.pooled.m

    @property
    def n(self) -> int:
        return self.pooled.n

    @property
    def d(self) -> int:
        return self.pooled.d


def _class_key(raw: str):
    try:
        return (0, float(raw), raw)
    except ValueError:
        return (1, 0.0, raw)


def load_delimited(path, delimiter: str = ",", label_column: int = 0) -> Dataset:
    """Parse one observation per row with the class id in ``label_column``.

    The two class ids map to 1 and 2 in ascending order; rows are reordered
    so sample 1 comes first, keeping file order within each class.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    rows: list[tuple[str, list[float]]] = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter) if delimiter.strip() else None
        lines = reader if reader is not None else (line.split() for line in fh)
        for lineno, fields in enumerate(lines, start=1):
            fields = [f.strip() for f in fields]
            if not fields or all(f == "" for f in fields):
                continue
            if not -len(fields) <= label_column < len(fields):
                raise DataError(f"{path}:{lineno}: no column {label_column} in a row of {len(fields)} fields")
            col = label_column % len(fields)
            label = fields[col]
            values = fields[:col] + fields[col + 1:]
            if label == "":
                raise DataError(f"{path}:{lineno}: missing class label")
            try:
                coords = [float(v) for v in values]
            except ValueError:
                bad = next(v for v in values if not _is_number(v))
                raise DataError(f"{path}:{lineno}: non-numeric field {bad!r}") from None
            if not coords:
                raise DataError(f"{path}:{lineno}: row has no measurements")
            if not np.all(np.isfinite(coords)):
                raise DataError(f"{path}:{lineno}: non-finite measurement")
            if width is None:
                width = len(coords)
            elif len(coords) != width:
                raise DataError(f"{path}:{lineno}: expected {width} measurements, found {len(coords)}")
            rows.append((label, coords))
    if not rows:
        raise DataError(f"{path}: file contains no observations")
    classes = sorted({r[0] for r in rows}, key=_class_key)
    if len(classes) != 2:
        raise DataError(f"{path}: expected exactly 2 classes, found {len(classes)}: {', '.join(classes)}")
    class_map = {classes[0]: 1, classes[1]: 2}
    x = [c for lab, c in rows if class_map[lab] == 1]
    y = [c for lab, c in rows if class_map[lab] == 2]
    if len(x) + len(y) < 3:
        raise DataError(f"{path}: need at least 3 observations, found {len(x) + len(y)}")
    pooled = PooledSample(np.array(x + y, dtype=float), len(x), len(y))
    return Dataset(pooled, LabelVector.from_counts(len(x), len(y)), str(path), class_map)


def _is_number(v: str) -> bool:
    try:
        float(v)
    except ValueError:
        return False
    return True


def dataset_text(ds: Dataset, delimiter: str = ",") -> str:
    """Rows as ``label<delim>v1<delim>...``, floats in shortest round-trip form."""
    inverse = {v: k for k, v in ds.class_map.items()} or {1: "1", 2: "2"}
    out = []
    for lab, row in zip(ds.labels.labels, ds.pooled.points):
        out.append(delimiter.join([str(inverse[int(lab)])] + [repr(float(v)) for v in row]))
    return "\n".join(out) + "\n"


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_delimited(ds: Dataset, path, delimiter: str = ",") -> None:
    atomic_write(path, dataset_text(ds, delimiter))


def apportion(counts, total: int) -> list[int]:
    """Largest-remainder apportionment of ``total`` to classes of the given sizes.

    Remainder ties go to the earlier class; every class keeps at least one point.
    """
    counts = [int(c) for c in counts]
    size = sum(counts)
    if total < len(counts):
        raise ValueError(f"subsample of size {total} cannot keep all {len(counts)} classes")
    if total > size:
        raise ValueError(f"subsample size {total} exceeds dataset size {size}")
    quotas = [c * total / size for c in counts]
    alloc = [int(q) for q in quotas]
    order = sorted(range(len(counts)), key=lambda i: (-(quotas[i] - alloc[i]), i))
    for i in order[:total - sum(alloc)]:
        alloc[i] += 1
    for i in range(len(alloc)):
        if alloc[i] == 0:
            donor = max(range(len(alloc)), key=lambda t: (alloc[t] - quotas[t], -t))
            alloc[donor] -= 1
            alloc[i] = 1
    return alloc


@dataclass(frozen=True)
class SubsampleSpec:
    total_size: int
    seed: int = 0


def subsample(ds: Dataset, spec: SubsampleSpec) -> Dataset:
    """Class-proportional subsample drawn without replacement within each class."""
    if spec.total_size < 2:
        raise ValueError(f"subsample size must be >= 2, got {spec.total_size}")
    take_m, take_n = apportion([ds.m, ds.n], spec.total_size)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(spec.seed))))
    ix = np.sort(rng.choice(ds.m, size=take_m, replace=False))
    iy = ds.m + np.sort(rng.choice(ds.n, size=take_n, replace=False))
    pts = ds.pooled.points[np.r_[ix, iy]]
    if take_m + take_n < 3:
        raise ValueError("subsample needs at least 3 observations")
    return Dataset(PooledSample(pts, take_m, take_n), LabelVector.from_counts(take_m, take_n),
                   ds.source, dict(ds.class_map))
