"""Sparse regression in the unscaled landmarked space (RegLand-Sp).

Forward Greedy Selection over the L1 ball ||w||_1 <= C_W: each step moves
toward the signed vertex C_W * e_r of the coordinate with the largest
gradient magnitude. The fully-corrective variant re-fits all weights on the
current support after every addition.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .dense_reg import LinearModel, _check_xy
from .errors import ConfigError, NumericError
from .loss import DEFAULT_BETA, DEFAULT_EPSILON, smoothed_eps, smoothed_eps_grad

VARIANTS = ("plain", "fully-corrective")
SURROGATES = ("smoothed-eps", "squared")

NONZERO_TOL = 1e-12
FC_INNER_STEPS = 200


def default_sparsity(c_w: float, eps: float) -> int:
    return int(math.ceil(8.0 * c_w * c_w / (eps * eps)))


@dataclass(frozen=True)
class FgsConfig:
    c_w: float = 1.0
    epsilon_tol: float = 0.01
    beta: float = DEFAULT_BETA
    max_sparsity: int | None = None
    variant: str = "fully-corrective"
    surrogate: str = "squared"
    loss_epsilon: float = DEFAULT_EPSILON  # tube width of the smoothed-eps surrogate

    def __post_init__(self):
        if not self.c_w > 0 or not self.epsilon_tol > 0 or not self.beta > 0:
            raise ConfigError("c_w, epsilon_tol and beta must be > 0")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown FGS variant {self.variant!r}")
        if self.surrogate not in SURROGATES:
            raise ConfigError(f"unknown surrogate {self.surrogate!r}")
        if self.max_sparsity is not None and self.max_sparsity < 1:
            raise ConfigError("max_sparsity must be >= 1")

    @property
    def k(self) -> int:
        if self.max_sparsity is not None:
            return int(self.max_sparsity)
        return default_sparsity(self.c_w, self.epsilon_tol)


@dataclass
class FgsTrace:
    t: list = field(default_factory=list)
    r: list = field(default_factory=list)
    delta: list = field(default_factory=list)
    eta: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    weights: list = field(default_factory=list)  # w^(t) at which delta_t was measured

    def __len__(self):
        return len(self.t)

    def append(self, t, r, delta, eta, obj, w):
        self.t.append(t)
        self.r.append(r)
        self.delta.append(delta)
        self.eta.append(eta)
        self.objective.append(obj)
        self.weights.append(w.copy())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t", "r_t", "delta_t", "eta_t", "objective"])
            for row in zip(self.t, self.r, self.delta, self.eta, self.objective):
                wr.writerow([row[0], row[1], repr(row[2]), repr(row[3]), repr(row[4])])


class _Risk:
    """Empirical surrogate risk and its gradient."""

    def __init__(self, X, y, cfg: FgsConfig):
        self.X, self.y, self.cfg = X, y, cfg
        self.n = X.shape[0]
        x_inf = float(np.abs(X).max()) if X.size else 0.0
        # per-coordinate smoothness of the empirical risk; equals beta when |K| <= 1
        curvature = 2.0 if cfg.surrogate == "squared" else cfg.beta
        self.smoothness = curvature * max(1.0, x_inf * x_inf)

    def value(self, w) -> float:
        f = self.X @ w
        if self.cfg.surrogate == "squared":
            return float(np.mean((f - self.y) ** 2))
        return float(np.mean(smoothed_eps(f, self.y, self.cfg.loss_epsilon, self.cfg.beta)))

    def grad(self, w) -> np.ndarray:
        f = self.X @ w
        if self.cfg.surrogate == "squared":
            dl = 2.0 * (f - self.y)
        else:
            dl = smoothed_eps_grad(f, self.y, self.cfg.loss_epsilon, self.cfg.beta)
        return self.X.T @ np.asarray(dl) / self.n


def _project_l1_by_rescale(w, c_w):
    nrm = float(np.abs(w).sum())
    return w * (c_w / nrm) if nrm > c_w else w


def _refit_support(risk: _Risk, w, support, c_w):
    """Best weights restricted to ``support``, kept inside the L1 ball."""
    Xs = risk.X[:, support]
    if risk.cfg.surrogate == "squared":
        sol, *_ = np.linalg.lstsq(Xs, risk.y, rcond=None)
        out = np.zeros_like(w)
        out[support] = sol
        return _project_l1_by_rescale(out, c_w)
    ws = w[support].copy()
    lip = risk.cfg.beta * float(np.linalg.norm(Xs, 2)) ** 2 / risk.n
    step = 1.0 / lip if lip > 0 else 0.0
    for _ in range(FC_INNER_STEPS):
        f = Xs @ ws
        g = Xs.T @ smoothed_eps_grad(f, risk.y, risk.cfg.loss_epsilon, risk.cfg.beta) / risk.n
        ws = _project_l1_by_rescale(ws - step * np.asarray(g), c_w)
    out = np.zeros_like(w)
    out[support] = ws
    return out


def fit_fgs(X_embedded, y, cfg: FgsConfig | None = None, embedder=None):
    """Forward Greedy Selection; returns ``(LinearModel, FgsTrace)``."""
    cfg = cfg or FgsConfig()
    X, y = _check_xy(X_embedded, y)
    risk = _Risk(X, y, cfg)
    c_w = cfg.c_w
    w = np.zeros(X.shape[1])
    trace = FgsTrace()
    support: list[int] = []
    obj = risk.value(w)
    for t in range(cfg.k):
        theta = risk.grad(w)
        if not np.all(np.isfinite(theta)):
            raise NumericError(f"non-finite risk gradient at iteration {t}")
        absth = np.abs(theta)
        r = int(np.argmax(absth))  # first maximal index on ties
        delta = float(theta @ w + c_w * absth[r])
        eta = min(1.0, delta / (4.0 * c_w * c_w * risk.smoothness))
        trace.append(t, r, delta, eta, obj, w)
        if delta <= cfg.epsilon_tol:
            break
        vertex = np.zeros_like(w)
        vertex[r] = -np.sign(theta[r]) * c_w
        w_next = (1.0 - eta) * w + eta * vertex
        if r not in support:
            support.append(r)
        if cfg.variant == "fully-corrective":
            w_fc = _refit_support(risk, w_next, sorted(support), c_w)
            if risk.value(w_fc) <= risk.value(w_next):
                w_next = w_fc
        w = w_next
        obj = risk.value(w)
    w[np.abs(w) <= NONZERO_TOL] = 0.0
    model = LinearModel(
        w=w, norm_bound=float(c_w), epsilon=float(cfg.loss_epsilon), embedder=embedder,
        iterations=len(trace), objective=risk.value(w),
        diagnostics={"variant": cfg.variant, "surrogate": cfg.surrogate, "k": cfg.k},
    )
    return model, trace


def sparsity(m) -> int:
    w = m.w if hasattr(m, "w") else np.asarray(m)
    return int(np.count_nonzero(np.abs(w) > NONZERO_TOL))
