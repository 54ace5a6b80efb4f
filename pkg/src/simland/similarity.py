"""Similarity functions K(x, y), including indefinite ones.

Points are 1-D feature vectors. For the ``precomputed`` kind a point is a
length-1 vector holding an integer row index into the stored matrix, so split
and landmark logic can carry indices through unchanged.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError, NumericError

KINDS = ("sigmoid", "manhattan", "gaussian", "euclidean", "linear", "precomputed")

SIGMA_SAMPLE_CAP = 2000


@dataclass(frozen=True, eq=False)
class SimilaritySpec:
    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown similarity kind {self.kind!r}")
        params = {k: float(v) for k, v in dict(self.params).items()}
        if self.kind == "sigmoid":
            params.setdefault("a", 1.0)
            params.setdefault("r", -1.0)
        if self.kind == "gaussian":
            sigma = params.get("sigma")
            if sigma is None or not np.isfinite(sigma) or sigma <= 0:
                raise ConfigError("gaussian similarity needs sigma > 0")
        object.__setattr__(self, "params", MappingProxyType(params))
        if self.kind == "precomputed":
            if self.matrix is None:
                raise ConfigError("precomputed similarity needs a matrix")
            mat = np.array(self.matrix, dtype=np.float64)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise DataError(f"precomputed matrix must be square, got shape {mat.shape}")
            if not np.all(np.isfinite(mat)):
                raise DataError("precomputed matrix has non-finite entries")
            mat.setflags(write=False)
            object.__setattr__(self, "matrix", mat)
        elif self.matrix is not None:
            raise ConfigError(f"kind {self.kind!r} does not take a matrix")

    def describe(self) -> str:
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={v:.6g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "params": dict(self.params)}
        if self.matrix is not None:
            out["matrix"] = self.matrix.tolist()
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "SimilaritySpec":
        matrix = d.get("matrix")
        return cls(d["kind"], d.get("params", {}), None if matrix is None else np.asarray(matrix))


def similarity_matrix(spec: SimilaritySpec, X, Y) -> np.ndarray:
    """K(X[i], Y[j]) for every pair, as an (n, m) array."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y.reshape(-1, X.shape[1]) if Y.size else np.empty((0, X.shape[1]))
    if X.shape[1] != Y.shape[1]:
        raise DataError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    if spec.kind == "precomputed":
        out = spec.matrix[np.ix_(_as_index(spec, X), _as_index(spec, Y))]
    else:
        p = spec.params
        out = _kernels.pairwise_similarity(
            _kernels.KIND_CODES[spec.kind], X, Y,
            a=p.get("a", 0.0), r=p.get("r", 0.0), sigma=p.get("sigma", 1.0),
        )
    if not np.all(np.isfinite(out)):
        raise NumericError(f"{spec.kind} similarity produced non-finite values")
    return out


def evaluate(spec: SimilaritySpec, x, y) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DataError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(similarity_matrix(spec, x[None, :], y[None, :])[0, 0])


def similarity_row(spec: SimilaritySpec, x, landmarks) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    L = np.asarray(landmarks, dtype=np.float64)
    if L.size == 0:
        return np.empty(0)
    return similarity_matrix(spec, x[None, :], L.reshape(-1, x.shape[0]) if L.ndim == 1 else L)[0]


def mean_pairwise_distance(X, cap: int = SIGMA_SAMPLE_CAP, seed: int = 0) -> float:
    """Average Euclidean distance over unordered pairs, on at most ``cap`` sampled rows."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 2:
        raise DataError("need at least two points to estimate sigma")
    if n > cap:
        idx = np.random.default_rng(seed).choice(n, size=cap, replace=False)
        X = X[np.sort(idx)]
        n = cap
    sq = -_kernels.pairwise_similarity(_kernels.EUCLIDEAN, X, X)
    iu = np.triu_indices(n, k=1)
    return float(np.sqrt(np.maximum(sq[iu], 0.0)).mean())


def default_params(kind: str, dataset, seed: int = 0) -> SimilaritySpec:
    """Data-driven parameters: sigmoid a = 1/dim, r = -1; gaussian sigma = mean pairwise distance."""
    X = np.atleast_2d(np.asarray(dataset, dtype=np.float64))
    if X.shape[0] == 0:
        raise DataError("empty dataset")
    if kind == "sigmoid":
        return SimilaritySpec("sigmoid", {"a": 1.0 / X.shape[1], "r": -1.0})
    if kind == "gaussian":
        return SimilaritySpec("gaussian", {"sigma": mean_pairwise_distance(X, seed=seed)})
    if kind == "precomputed":
        raise ConfigError("precomputed similarity has no data-driven defaults; load a matrix")
    return SimilaritySpec(kind)


def load_precomputed(path) -> SimilaritySpec:
    """Read a dense CSV where row i, column j holds K(i, j)."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: empty similarity matrix")
    try:
        mat = np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    return SimilaritySpec("precomputed", matrix=mat)


def _as_index(spec, X):
    if X.shape[1] != 1:
        raise DataError("precomputed similarity expects single-column index points")
    idx = X[:, 0]
    if not np.all(idx == np.round(idx)) or idx.size and (idx.min() < 0 or idx.max() >= spec.matrix.shape[0]):
        raise DataError("precomputed index out of range or non-integer")
    return idx.astype(np.intp)
