"""Loss functions and their (sub)gradients.

All functions broadcast over numpy arrays and return floats for scalar input.
Subgradients at kinks are taken as 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError

DEFAULT_EPSILON = 0.01
DEFAULT_BETA = 1.0 / 0.01
DEFAULT_GAMMA = 0.25
DEFAULT_DELTA_SPACING = 1.0


@dataclass(frozen=True)
class LossParams:
    epsilon: float = DEFAULT_EPSILON
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    delta_spacing: float = DEFAULT_DELTA_SPACING

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ConfigError("epsilon must be >= 0")
        for name in ("beta", "gamma", "delta_spacing"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def eps_insensitive(a, b, eps):
    return _out(np.maximum(np.abs(np.subtract(a, b)) - eps, 0.0))


def eps_insensitive_subgrad(a, b, eps):
    diff = np.subtract(a, b)
    return _out(np.where(np.abs(diff) > eps, np.sign(diff), 0.0))


def smoothed_eps(a, b, eps, beta):
    """Moreau-smoothed epsilon-insensitive loss: zero, quadratic, then linear in |a - b|."""
    u = np.abs(np.subtract(a, b)) - eps
    half = 0.5 / np.asarray(beta, dtype=float)
    val = np.where(
        u <= 0.0, 0.0,
        np.where(u < 2.0 * half, 0.5 * beta * u * u, u - half),
    )
    # nudge by ulps so that 0 <= max(u, 0) - val <= 1/(2 beta) holds in floating point too
    hinge = np.maximum(u, 0.0)
    for _ in range(4):
        low = hinge - val > half
        if not np.any(low):
            break
        val = np.where(low, np.nextafter(val, np.inf), val)
    return _out(np.minimum(val, hinge))


def smoothed_eps_grad(a, b, eps, beta):
    """Derivative of :func:`smoothed_eps` in ``a``; Lipschitz with constant ``beta``."""
    diff = np.subtract(a, b)
    u = np.abs(diff) - eps
    mag = np.clip(beta * u, 0.0, 1.0)
    return _out(mag * np.sign(diff))


def gamma_margin(x, gamma):
    return _out(np.maximum(gamma - np.asarray(x, dtype=float), 0.0))


def gamma_margin_subgrad(x, gamma):
    return _out(np.where(np.asarray(x, dtype=float) < gamma, -1.0, 0.0))


def absolute(a, b):
    return _out(np.abs(np.subtract(a, b)))


def squared(a, b):
    """(a - b)^2 for scalars, ||a - b||_2^2 for equal-length vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 0 and b.ndim == 0:
        return float((a - b) ** 2)
    if a.shape != b.shape:
        raise DataError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.sum((a - b) ** 2))


def psi_delta(x, delta):
    """Maps a margin-loss bound to a mislabelling bound for delta-spaced thresholds."""
    if not delta > 0:
        raise ConfigError("delta must be > 0")
    return _out((np.asarray(x, dtype=float) + delta - 1.0) / delta)
