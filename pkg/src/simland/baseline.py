"""Kernel regression (Nadaraya-Watson) baseline.

f(x) = sum_i y_i K(x, x_i) / sum_i K(x, x_i), applied verbatim even for
indefinite kernels. When |sum_i K(x, x_i)| < 1e-9 the training-target mean is
returned instead.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .similarity import SimilaritySpec, similarity_matrix

DENOM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrModel:
    features: np.ndarray
    targets: np.ndarray
    spec: SimilaritySpec
    ordinal: bool = False
    num_labels: int | None = None

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.targets, dtype=float).ravel()
        if X.shape[0] < 1 or X.shape[0] != y.size:
            raise DataError("KR needs equal-length, non-empty features and targets")
        if self.ordinal and (self.num_labels is None or self.num_labels < 2):
            raise DataError("ordinal KR needs num_labels >= 2")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)


def kr_fit(X, y, spec: SimilaritySpec, ordinal: bool = False, num_labels: int | None = None) -> KrModel:
    return KrModel(X, y, spec, ordinal, num_labels)


def kr_predict_all(m: KrModel, X) -> np.ndarray:
    S = similarity_matrix(m.spec, X, m.features)
    num = S @ m.targets
    den = S.sum(axis=1)
    safe = np.abs(den) >= DENOM_TOL
    out = np.full(den.shape, float(m.targets.mean()))
    out[safe] = num[safe] / den[safe]
    if m.ordinal:
        # round half up, then clamp into the label range
        out = np.clip(np.floor(out + 0.5), 1, m.num_labels)
    return out


def kr_predict(m: KrModel, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return float(kr_predict_all(m, x[None, :])[0])
