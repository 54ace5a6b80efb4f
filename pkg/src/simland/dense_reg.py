"""Dense regression in the landmarked space (RegLand).

Minimises the mean epsilon-insensitive loss over the L2 ball ||w||_2 <= B by
projected subgradient descent with step B / (G_max sqrt(t)) and uniform
iterate averaging.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError
from .loss import DEFAULT_EPSILON, eps_insensitive

log = logging.getLogger(__name__)

DEFAULT_BOUND = 10.0
DEFAULT_ITERS = 2000
BOUND_GRID = (0.1, 1.0, 10.0, 100.0)

_HEADER = "simland-linear v1"


@dataclass(frozen=True, eq=False)
class LinearModel:
    w: np.ndarray
    norm_bound: float
    epsilon: float = 0.0
    embedder: object = None
    iterations: int = 0
    objective: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.w.shape[0]


def _check_xy(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("empty training set")
    if X.shape[0] != y.shape[0]:
        raise DataError(f"{X.shape[0]} rows but {y.shape[0]} targets")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DataError("non-finite training data")
    return X, y


def objective(w, X, y, eps) -> float:
    return float(np.mean(eps_insensitive(np.asarray(X) @ w, y, eps)))


def fit_dense(X_embedded, y, B: float = DEFAULT_BOUND, eps: float = DEFAULT_EPSILON,
              max_iters: int = DEFAULT_ITERS, seed: int = 0, embedder=None) -> LinearModel:
    """Projected subgradient descent on the epsilon-insensitive ERM over ||w||_2 <= B.

    Returns the averaged iterate unless the best visited iterate (which
    includes w = 0) has a strictly lower objective. ``seed`` is accepted for
    interface symmetry; the solver is deterministic from w = 0.
    """
    X, y = _check_xy(X_embedded, y)
    if not B > 0:
        raise ConfigError("norm bound B must be > 0")
    if max_iters < 1:
        raise ConfigError("max_iters must be >= 1")
    w_avg, w_best, best_obj, hist = _kernels.psgd_eps(X, y, B, eps, max_iters)
    w_avg = _project_l2(w_avg, B)
    avg_obj = objective(w_avg, X, y, eps)
    if avg_obj <= best_obj:
        w, obj, picked = w_avg, avg_obj, "average"
    else:
        w, obj, picked = w_best, best_obj, "best-iterate"
    return LinearModel(
        w=np.array(w), norm_bound=float(B), epsilon=float(eps), embedder=embedder,
        iterations=int(max_iters), objective=obj,
        diagnostics={"best_objective_history": hist, "returned": picked},
    )


def select_bound(X_embedded, y, eps: float = DEFAULT_EPSILON, grid=BOUND_GRID,
                 max_iters: int = DEFAULT_ITERS, seed: int = 0, holdout: float = 0.2) -> float:
    """Pick B from ``grid`` by validation MSE on a seeded holdout carve-out."""
    X, y = _check_xy(X_embedded, y)
    n = X.shape[0]
    n_val = int(np.ceil(holdout * n))
    if n_val < 1 or n_val >= n:
        return float(DEFAULT_BOUND)
    perm = np.random.default_rng(seed).permutation(n)
    val, tr = perm[:n_val], perm[n_val:]
    scores = []
    for B in grid:
        m = fit_dense(X[tr], y[tr], B=B, eps=eps, max_iters=max_iters)
        scores.append(float(np.mean((X[val] @ m.w - y[val]) ** 2)))
    return float(grid[int(np.argmin(scores))])


def predict(m: LinearModel, x_embedded) -> float:
    x = np.asarray(x_embedded, dtype=np.float64).ravel()
    if x.shape[0] != m.d:
        raise DataError(f"dimension mismatch: model d={m.d}, input {x.shape[0]}")
    return float(np.dot(m.w, x))


def predict_all(m: LinearModel, X_embedded) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X_embedded, dtype=np.float64))
    if X.shape[1] != m.d:
        raise DataError(f"dimension mismatch: model d={m.d}, input {X.shape[1]}")
    return X @ m.w


def _project_l2(w, B):
    nrm = float(np.linalg.norm(w))
    return w * (B / nrm) if nrm > B else w


# -- flat text serialization ------------------------------------------------


def format_linear(m: LinearModel) -> list[str]:
    lines = [f"{_HEADER} d={m.d} B={m.norm_bound!r} eps={m.epsilon!r}"]
    lines += [repr(float(v)) for v in m.w]
    return lines


def parse_linear(lines: list[str]) -> tuple[LinearModel, list[str]]:
    """Parse the linear block; returns the model and any trailing lines."""
    if not lines or not lines[0].startswith(_HEADER):
        raise DataError("not a simland-linear v1 model")
    fields = dict(tok.split("=", 1) for tok in lines[0][len(_HEADER):].split())
    try:
        d = int(fields["d"])
        w = np.array([float(v) for v in lines[1:1 + d]])
        model = LinearModel(w=w, norm_bound=float(fields["B"]), epsilon=float(fields["eps"]))
    except (KeyError, ValueError) as exc:
        raise DataError(f"malformed model file: {exc}") from None
    if w.shape[0] != d:
        raise DataError(f"model header says d={d} but found {w.shape[0]} weights")
    return model, lines[1 + d:]


def save_linear(m: LinearModel, path) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(format_linear(m)) + "\n")


def load_linear(path) -> LinearModel:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    model, _ = parse_linear(lines)
    return model


def with_embedder(m: LinearModel, embedder) -> LinearModel:
    return replace(m, embedder=embedder)
