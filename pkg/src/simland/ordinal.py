"""Ordinal regression with fixed equi-spaced thresholds (ORLand).

Label i in {1..r} owns the slab [b_i, b_{i+1}) with b_1 = -inf, b_{r+1} = +inf
and b_i = i - 1 otherwise. Training penalises margin violations against both
bracketing thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dense_reg import DEFAULT_BOUND, DEFAULT_ITERS, LinearModel, _check_xy, _project_l2
from .dense_reg import format_linear, parse_linear
from .errors import ConfigError, DataError
from .loss import DEFAULT_GAMMA


@dataclass(frozen=True, eq=False)
class OrdinalModel:
    linear: LinearModel
    thresholds: np.ndarray  # b_2 .. b_r
    gamma: float
    num_labels: int

    def __post_init__(self):
        b = np.asarray(self.thresholds, dtype=float)
        if b.shape != (self.num_labels - 1,):
            raise ConfigError(f"expected {self.num_labels - 1} thresholds, got {b.shape}")
        if np.any(np.diff(b) <= 0):
            raise ConfigError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", b)

    @property
    def spacing(self) -> float:
        return float(np.diff(self.thresholds).min()) if self.num_labels > 2 else float("inf")


def fixed_thresholds(r: int) -> np.ndarray:
    if r < 2:
        raise ConfigError("need at least two labels")
    return np.arange(1, r, dtype=float)


def _bracket(labels, b, r):
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 1 or labels.max() > r or np.any(labels != np.round(labels))):
        raise DataError(f"labels must be integers in 1..{r}")
    full = np.concatenate(([-np.inf], b, [np.inf]))  # full[i-1] = b_i
    idx = labels.astype(np.intp)
    return full[idx - 1], full[idx]


def ordinal_objective(w, X_embedded, labels, b, gamma: float) -> float:
    b = np.asarray(b, dtype=float)
    r = b.shape[0] + 1
    lo, hi = _bracket(labels, b, r)
    f = np.asarray(X_embedded, dtype=float) @ np.asarray(w, dtype=float)
    with np.errstate(invalid="ignore"):
        left = np.maximum(gamma - (f - lo), 0.0)
        right = np.maximum(gamma - (hi - f), 0.0)
    return float(np.mean(left + right))


def fit_ordinal(X_embedded, labels, r: int, B: float = DEFAULT_BOUND, gamma: float = DEFAULT_GAMMA,
                max_iters: int = DEFAULT_ITERS, seed: int = 0, embedder=None) -> OrdinalModel:
    """Projected subgradient descent on the two-sided margin objective over ||w||_2 <= B."""
    X, y = _check_xy(X_embedded, labels)
    if not B > 0 or not gamma > 0:
        raise ConfigError("B and gamma must be > 0")
    b = fixed_thresholds(r)
    lo, hi = _bracket(y, b, r)
    w_avg, w_best, best_obj, hist = _kernels.psgd_margin(X, lo, hi, B, gamma, max_iters)
    w_avg = _project_l2(w_avg, B)
    avg_obj = ordinal_objective(w_avg, X, y, b, gamma)
    if avg_obj <= best_obj:
        w, obj, picked = w_avg, avg_obj, "average"
    else:
        w, obj, picked = w_best, best_obj, "best-iterate"
    lin = LinearModel(w=np.array(w), norm_bound=float(B), epsilon=0.0, embedder=embedder,
                      iterations=int(max_iters), objective=obj,
                      diagnostics={"best_objective_history": hist, "returned": picked})
    return OrdinalModel(lin, b, float(gamma), int(r))


def label_from_score(f, thresholds) -> np.ndarray:
    """Largest i with f >= b_i (b_1 = -inf)."""
    return 1 + np.searchsorted(np.asarray(thresholds, dtype=float), np.asarray(f, dtype=float), side="right")


def predict_label(m: OrdinalModel, x_embedded) -> int:
    x = np.asarray(x_embedded, dtype=float).ravel()
    if x.shape[0] != m.linear.d:
        raise DataError(f"dimension mismatch: model d={m.linear.d}, input {x.shape[0]}")
    return int(label_from_score(float(m.linear.w @ x), m.thresholds))


def predict_labels(m: OrdinalModel, X_embedded) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X_embedded, dtype=float))
    return label_from_score(X @ m.linear.w, m.thresholds)


def slab_centers(labels) -> np.ndarray:
    """Regression targets for the round-to-slab baseline: label i -> i - 0.5."""
    return np.asarray(labels, dtype=float) - 0.5


def round_to_label(f, r: int) -> np.ndarray:
    """Naive baseline: a real-valued score mapped to the slab that contains it."""
    return label_from_score(f, fixed_thresholds(r))


def ordinal_errors(preds, labels) -> tuple[float, float]:
    preds = np.asarray(preds, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if preds.shape != labels.shape:
        raise DataError(f"length mismatch: {preds.shape} vs {labels.shape}")
    diff = np.abs(preds - labels)
    return float(diff.mean()), float((diff != 0).mean())


def format_ordinal(m: OrdinalModel) -> list[str]:
    lines = format_linear(m.linear)
    lines.append(f"r={m.num_labels}")
    lines.append(f"gamma={m.gamma!r}")
    lines.append("thresholds=" + ",".join(repr(float(v)) for v in m.thresholds))
    return lines


def parse_ordinal(lines: list[str]) -> OrdinalModel:
    lin, rest = parse_linear(lines)
    kv = dict(ln.split("=", 1) for ln in rest if "=" in ln)
    try:
        r = int(kv["r"])
        gamma = float(kv["gamma"])
        b = np.array([float(v) for v in kv["thresholds"].split(",") if v])
    except (KeyError, ValueError) as exc:
        raise DataError(f"malformed ordinal model: {exc}") from None
    return OrdinalModel(lin, b, gamma, r)
