"""Dataset loading, preprocessing, splitting and seeded randomness."""
from __future__ import annotations

import csv
import math
import zlib
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError

TASKS = ("regression", "ordinal", "ranking")

DEFAULT_TEST_FRACTION = 0.3
DEFAULT_BINS = 10


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    task: str = "regression"
    provenance: tuple = ()
    qid: np.ndarray | None = None
    label_values: np.ndarray | None = None  # original label for each contiguous label 1..r

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.targets, dtype=float).ravel()
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}")
        if X.shape[0] < 1 or X.shape[0] != y.size:
            raise DataError(f"dataset needs >= 1 row and matching targets ({X.shape[0]} vs {y.size})")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("dataset has non-finite values")
        if self.task == "ordinal" and (np.any(y != np.round(y)) or y.min() < 1):
            raise DataError("ordinal targets must be integers >= 1")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "provenance", tuple(self.provenance))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def num_labels(self) -> int:
        return int(self.targets.max())

    def subset(self, idx, note: str | None = None) -> "Dataset":
        prov = self.provenance + ((note,) if note else ())
        return replace(self, features=self.features[idx], targets=self.targets[idx],
                       qid=None if self.qid is None else self.qid[idx], provenance=prov)

    def log(self, note: str) -> "Dataset":
        return replace(self, provenance=self.provenance + (note,))


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_csv(path, has_header: str = "auto", task: str = "regression") -> Dataset:
    """Numeric CSV with the target in the last column; ``;`` delimiters are detected."""
    with open(path, newline="") as fh:
        text = fh.read()
    first = text.split("\n", 1)[0]
    delim = ";" if ";" in first and "," not in first else ","
    rows = [row for row in csv.reader(text.splitlines(), delimiter=delim) if any(c.strip() for c in row)]
    if not rows:
        raise DataError(f"{path}: empty file")
    if has_header not in ("auto", "yes", "no"):
        raise ConfigError(f"has_header must be auto|yes|no, got {has_header!r}")
    if has_header == "yes" or (has_header == "auto" and not all(_is_number(c) for c in rows[0])):
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    if width < 2:
        raise DataError(f"{path}: need at least one feature and one target column")
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        try:
            data[i] = [float(c) for c in row]
        except ValueError:
            raise DataError(f"{path}: non-numeric cell in row {i + 1}") from None
    return Dataset(data[:, :-1], data[:, -1], task=task, provenance=(f"load {path}",))


def write_csv(ds: Dataset, path, header: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        if header:
            wr.writerow([f"f{j + 1}" for j in range(ds.p)] + ["target"])
        for x, y in zip(ds.features, ds.targets):
            wr.writerow([repr(float(v)) for v in x] + [repr(float(y))])


# -- scaling -----------------------------------------------------------------


@dataclass(frozen=True)
class ScaleParams:
    feature_mode: str = "zscore"
    target_mode: str = "minmax01"
    mean: tuple = ()
    std: tuple = ()
    y_min: float = 0.0
    y_range: float = 1.0

    def apply(self, ds: Dataset) -> Dataset:
        X = ds.features
        if self.feature_mode == "zscore":
            mu, sd = np.array(self.mean), np.array(self.std)
            X = np.where(sd > 0, (X - mu) / np.where(sd > 0, sd, 1.0), 0.0)
        y = ds.targets
        if self.target_mode == "minmax01":
            y = (y - self.y_min) / self.y_range if self.y_range > 0 else np.zeros_like(y)
        return replace(ds, features=X, targets=y,
                       provenance=ds.provenance + (f"apply scale {self.feature_mode}/{self.target_mode}",))

    def inverse_targets(self, y):
        y = np.asarray(y, dtype=float)
        if self.target_mode == "minmax01":
            return y * self.y_range + self.y_min
        return y

    def inverse_features(self, X):
        X = np.asarray(X, dtype=float)
        if self.feature_mode == "zscore":
            return X * np.array(self.std) + np.array(self.mean)
        return X

    def to_dict(self) -> dict:
        return {"feature_mode": self.feature_mode, "target_mode": self.target_mode,
                "mean": list(self.mean), "std": list(self.std),
                "y_min": self.y_min, "y_range": self.y_range}

    @classmethod
    def from_dict(cls, d) -> "ScaleParams":
        return cls(d["feature_mode"], d["target_mode"], tuple(d["mean"]), tuple(d["std"]),
                   float(d["y_min"]), float(d["y_range"]))


def fit_scale(train: Dataset, feature_mode: str = "zscore", target_mode: str = "minmax01") -> ScaleParams:
    if feature_mode not in ("zscore", "none") or target_mode not in ("minmax01", "none"):
        raise ConfigError(f"unknown scale modes {feature_mode!r}/{target_mode!r}")
    mean = std = ()
    if feature_mode == "zscore":
        mean = tuple(float(v) for v in train.features.mean(axis=0))
        std = tuple(float(v) for v in train.features.std(axis=0))
    y_min, y_range = 0.0, 1.0
    if target_mode == "minmax01":
        y_min = float(train.targets.min())
        y_range = float(train.targets.max()) - y_min
    return ScaleParams(feature_mode, target_mode, mean, std, y_min, y_range)


def scale(ds: Dataset, feature_mode: str = "zscore", target_mode: str = "minmax01"):
    """Fit scaling on ``ds`` and apply it; returns ``(scaled, params)``."""
    params = fit_scale(ds, feature_mode, target_mode)
    out = params.apply(ds)
    return out.log(f"fit scale on {ds.n} rows"), params


# -- ordinal labels ------------------------------------------------------------


def equifreq_bin(targets, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Equal-frequency labels 1..bins; tied values always share a label."""
    y = np.asarray(targets, dtype=float).ravel()
    if bins < 2:
        raise ConfigError("need at least two bins")
    if np.unique(y).size < bins:
        raise DataError(f"{bins} bins requested but only {np.unique(y).size} distinct values")
    n = y.size
    order = np.argsort(y, kind="stable")
    sorted_y = y[order]
    # rank of each value = position of its first occurrence in sorted order
    first = np.searchsorted(sorted_y, y, side="left")
    return (1 + (first * bins) // n).astype(int)


def contiguous_labels(ds: Dataset) -> Dataset:
    """Remap integer targets to 1..r, keeping the original values."""
    values, inv = np.unique(ds.targets, return_inverse=True)
    return replace(ds, targets=(inv + 1).astype(float), task="ordinal", label_values=values,
                   provenance=ds.provenance + (f"remap {values.size} labels to 1..{values.size}",))


def bin_dataset(ds: Dataset, bins: int = DEFAULT_BINS) -> Dataset:
    labels = equifreq_bin(ds.targets, bins)
    return replace(ds, targets=labels.astype(float), task="ordinal",
                   provenance=ds.provenance + (f"equifreq bin r={bins}",))


# -- splitting and randomness ------------------------------------------------------


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF))


def sub_seed(seed: int, split: int, purpose: str) -> int:
    """Seed for one (split, purpose) cell, independent of execution order."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=(int(split), zlib.crc32(purpose.encode())))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def split(ds: Dataset, test_fraction: float = DEFAULT_TEST_FRACTION, seed: int = 0):
    """Random train/test split; ranking data is split by query groups."""
    if not 0 < test_fraction < 1:
        raise ConfigError("test_fraction must lie in (0, 1)")
    gen = rng(seed)
    if ds.task == "ranking" and ds.qid is not None:
        groups = np.unique(ds.qid)
        n_test = math.ceil(test_fraction * groups.size)
        if n_test >= groups.size:
            raise ConfigError("test_fraction leaves no training queries")
        test_groups = gen.permutation(groups)[:n_test]
        mask = np.isin(ds.qid, test_groups)
        test_idx, train_idx = np.flatnonzero(mask), np.flatnonzero(~mask)
    else:
        n_test = math.ceil(test_fraction * ds.n)
        if n_test >= ds.n:
            raise ConfigError(f"test_fraction {test_fraction} leaves no training rows out of {ds.n}")
        perm = gen.permutation(ds.n)
        test_idx, train_idx = np.sort(perm[:n_test]), np.sort(perm[n_test:])
    return (ds.subset(train_idx, f"train split seed={seed}"),
            ds.subset(test_idx, f"test split seed={seed}"))
