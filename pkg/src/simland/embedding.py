"""Landmark selection and the landmarked map x -> (K(x, l_1), ..., K(x, l_d)).

``scaled`` normalisation multiplies by 1/sqrt(d) (used with L2-ball solvers);
``unscaled`` leaves raw similarities (used with the L1-ball greedy solver).
Built-in kernels are not rescaled to |K| <= 1; norm bounds absorb the scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .similarity import SimilaritySpec, similarity_matrix

NORMALIZATIONS = ("scaled", "unscaled")
MODES = ("unlabeled-pool", "double-dip")


@dataclass(frozen=True, eq=False)
class Embedder:
    landmarks: np.ndarray
    spec: SimilaritySpec
    normalization: str = "scaled"
    double_dip: bool = False
    indices: np.ndarray | None = None  # positions of the landmarks inside the sampled pool

    def __post_init__(self):
        L = np.array(self.landmarks, dtype=np.float64)
        if L.ndim != 2 or L.shape[0] < 1:
            raise ConfigError("an embedder needs at least one landmark")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        L.setflags(write=False)
        object.__setattr__(self, "landmarks", L)

    @property
    def d(self) -> int:
        return self.landmarks.shape[0]

    def with_normalization(self, normalization: str) -> "Embedder":
        return Embedder(self.landmarks, self.spec, normalization, self.double_dip, self.indices)

    def prefix(self, d: int) -> "Embedder":
        """The embedder built from the first ``d`` landmarks (nested landmark sweeps)."""
        if not 1 <= d <= self.d:
            raise ConfigError(f"prefix size {d} outside 1..{self.d}")
        idx = None if self.indices is None else self.indices[:d]
        return Embedder(self.landmarks[:d], self.spec, self.normalization, self.double_dip, idx)


def select_landmarks(pool, d: int, spec: SimilaritySpec, mode: str = "unlabeled-pool",
                     seed: int = 0, normalization: str = "scaled") -> Embedder:
    """Sample ``d`` landmarks uniformly without replacement from ``pool``.

    ``mode="double-dip"`` marks the pool as the labelled training set; callers
    may then keep those points as training examples too.
    """
    pool = np.atleast_2d(np.asarray(pool, dtype=np.float64))
    if mode not in MODES:
        raise ConfigError(f"unknown landmark mode {mode!r}")
    n = pool.shape[0]
    if n == 0 or pool.size == 0:
        raise DataError("empty landmark pool")
    if d < 1 or d > n:
        raise DataError(f"cannot sample {d} landmarks from a pool of {n}")
    idx = np.random.default_rng(seed).permutation(n)[:d]
    return Embedder(pool[idx], spec, normalization, mode == "double-dip", idx)


def embed_all(e: Embedder, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size == 0:
        return np.empty((0, e.d))
    xs = np.atleast_2d(xs)
    if xs.shape[1] != e.landmarks.shape[1]:
        raise DataError(f"dimension mismatch: {xs.shape[1]} vs {e.landmarks.shape[1]}")
    out = similarity_matrix(e.spec, xs, e.landmarks)
    if e.normalization == "scaled":
        out /= np.sqrt(e.d)
    return out


def embed(e: Embedder, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    return embed_all(e, x[None, :])[0]
