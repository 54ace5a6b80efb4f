"""Hot numeric loops, each in a numba flavour (``*_nb``) and a numpy flavour (``*_np``).

The dispatching wrappers at the bottom pick one according to ``_accel.USE_NUMBA``.
Both flavours compute the same quantities; only floating point summation order
may differ between them.
"""
import math

import numpy as np

from . import _accel
from ._accel import njit

SIGMOID, MANHATTAN, GAUSSIAN, EUCLIDEAN, LINEAR = 0, 1, 2, 3, 4

KIND_CODES = {
    "sigmoid": SIGMOID,
    "manhattan": MANHATTAN,
    "gaussian": GAUSSIAN,
    "euclidean": EUCLIDEAN,
    "linear": LINEAR,
}

# rows per block in the broadcasting numpy path; bounds the (rows, m, p) temporary
_NP_BLOCK_ELEMS = 4_000_000


# --------------------------------------------------------------------------
# pairwise similarity
# --------------------------------------------------------------------------


@njit
def pairwise_similarity_nb(kind, X, Y, a, r, sigma):
    n, p = X.shape
    m = Y.shape[0]
    out = np.empty((n, m))
    inv2s2 = 0.0
    if kind == GAUSSIAN:
        inv2s2 = 1.0 / (2.0 * sigma * sigma)
    for i in range(n):
        for j in range(m):
            s = 0.0
            if kind == SIGMOID or kind == LINEAR:
                for k in range(p):
                    s += X[i, k] * Y[j, k]
                if kind == SIGMOID:
                    s = math.tanh(a * s + r)
            elif kind == MANHATTAN:
                for k in range(p):
                    s += abs(X[i, k] - Y[j, k])
                s = -s
            else:
                for k in range(p):
                    diff = X[i, k] - Y[j, k]
                    s += diff * diff
                if kind == GAUSSIAN:
                    s = math.exp(-s * inv2s2)
                else:
                    s = -s
            out[i, j] = s
    return out


def pairwise_similarity_np(kind, X, Y, a, r, sigma):
    n, p = X.shape
    m = Y.shape[0]
    out = np.empty((n, m))
    block = max(1, _NP_BLOCK_ELEMS // max(1, m * p))
    for start in range(0, n, block):
        Xb = X[start:start + block, None, :]
        if kind == SIGMOID or kind == LINEAR:
            s = (Xb * Y[None, :, :]).sum(axis=-1)
            if kind == SIGMOID:
                s = np.tanh(a * s + r)
        elif kind == MANHATTAN:
            s = -np.abs(Xb - Y[None, :, :]).sum(axis=-1)
        else:
            s = ((Xb - Y[None, :, :]) ** 2).sum(axis=-1)
            s = np.exp(-s / (2.0 * sigma * sigma)) if kind == GAUSSIAN else -s
        out[start:start + block] = s
    return out


# --------------------------------------------------------------------------
# projected subgradient descent, L2 ball, epsilon-insensitive loss
# --------------------------------------------------------------------------


@njit
def psgd_eps_nb(X, y, B, eps, iters):
    n, d = X.shape
    w = np.zeros(d)
    w_sum = np.zeros(d)
    best_w = np.zeros(d)
    best_obj = np.inf
    best_hist = np.empty(iters)
    g_max = 0.0
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += X[i, j] * X[i, j]
        g_max = max(g_max, math.sqrt(s))
    resid = np.empty(n)
    grad = np.empty(d)
    for t in range(1, iters + 1):
        obj = 0.0
        for i in range(n):
            f = 0.0
            for j in range(d):
                f += X[i, j] * w[j]
            resid[i] = f - y[i]
            excess = abs(resid[i]) - eps
            if excess > 0.0:
                obj += excess
        obj /= n
        if obj < best_obj:
            best_obj = obj
            best_w[:] = w
        best_hist[t - 1] = best_obj
        if g_max == 0.0:
            w_sum += w
            continue
        for j in range(d):
            grad[j] = 0.0
        for i in range(n):
            if abs(resid[i]) > eps:
                sgn = 1.0 if resid[i] > 0.0 else -1.0
                for j in range(d):
                    grad[j] += sgn * X[i, j]
        step = B / (g_max * math.sqrt(t)) / n
        nrm = 0.0
        for j in range(d):
            w[j] -= step * grad[j]
            nrm += w[j] * w[j]
        nrm = math.sqrt(nrm)
        if nrm > B:
            scale = B / nrm
            for j in range(d):
                w[j] *= scale
        w_sum += w
    return w_sum / iters, best_w, best_obj, best_hist


def psgd_eps_np(X, y, B, eps, iters):
    n, d = X.shape
    w = np.zeros(d)
    w_sum = np.zeros(d)
    best_w = np.zeros(d)
    best_obj = np.inf
    best_hist = np.empty(iters)
    g_max = float(np.sqrt((X * X).sum(axis=1)).max())
    for t in range(1, iters + 1):
        resid = X @ w - y
        obj = float(np.maximum(np.abs(resid) - eps, 0.0).mean())
        if obj < best_obj:
            best_obj = obj
            best_w = w.copy()
        best_hist[t - 1] = best_obj
        if g_max == 0.0:
            w_sum += w
            continue
        sgn = np.where(np.abs(resid) > eps, np.sign(resid), 0.0)
        w = w - (B / (g_max * math.sqrt(t))) * (X.T @ sgn) / n
        nrm = float(np.sqrt(w @ w))
        if nrm > B:
            w *= B / nrm
        w_sum += w
    return w_sum / iters, best_w, best_obj, best_hist


# --------------------------------------------------------------------------
# projected subgradient descent, L2 ball, two-sided gamma-margin (ordinal) loss
# lo[i] / hi[i] are the thresholds bracketing sample i's label (+-inf allowed)
# --------------------------------------------------------------------------


@njit
def psgd_margin_nb(X, lo, hi, B, gamma, iters):
    n, d = X.shape
    w = np.zeros(d)
    w_sum = np.zeros(d)
    best_w = np.zeros(d)
    best_obj = np.inf
    best_hist = np.empty(iters)
    g_max = 0.0
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += X[i, j] * X[i, j]
        g_max = max(g_max, math.sqrt(s))
    coef = np.empty(n)
    grad = np.empty(d)
    for t in range(1, iters + 1):
        obj = 0.0
        for i in range(n):
            f = 0.0
            for j in range(d):
                f += X[i, j] * w[j]
            c = 0.0
            left = gamma - (f - lo[i])
            if left > 0.0:
                obj += left
                c -= 1.0
            right = gamma - (hi[i] - f)
            if right > 0.0:
                obj += right
                c += 1.0
            coef[i] = c
        obj /= n
        if obj < best_obj:
            best_obj = obj
            best_w[:] = w
        best_hist[t - 1] = best_obj
        if g_max == 0.0:
            w_sum += w
            continue
        for j in range(d):
            grad[j] = 0.0
        for i in range(n):
            c = coef[i]
            if c != 0.0:
                for j in range(d):
                    grad[j] += c * X[i, j]
        step = B / (g_max * math.sqrt(t)) / n
        nrm = 0.0
        for j in range(d):
            w[j] -= step * grad[j]
            nrm += w[j] * w[j]
        nrm = math.sqrt(nrm)
        if nrm > B:
            scale = B / nrm
            for j in range(d):
                w[j] *= scale
        w_sum += w
    return w_sum / iters, best_w, best_obj, best_hist


def psgd_margin_np(X, lo, hi, B, gamma, iters):
    n, d = X.shape
    w = np.zeros(d)
    w_sum = np.zeros(d)
    best_w = np.zeros(d)
    best_obj = np.inf
    best_hist = np.empty(iters)
    g_max = float(np.sqrt((X * X).sum(axis=1)).max())
    for t in range(1, iters + 1):
        f = X @ w
        left = gamma - (f - lo)
        right = gamma - (hi - f)
        obj = float((np.maximum(left, 0.0) + np.maximum(right, 0.0)).mean())
        if obj < best_obj:
            best_obj = obj
            best_w = w.copy()
        best_hist[t - 1] = best_obj
        if g_max == 0.0:
            w_sum += w
            continue
        coef = (right > 0.0).astype(float) - (left > 0.0).astype(float)
        w = w - (B / (g_max * math.sqrt(t))) * (X.T @ coef) / n
        nrm = float(np.sqrt(w @ w))
        if nrm > B:
            w *= B / nrm
        w_sum += w
    return w_sum / iters, best_w, best_obj, best_hist


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def pairwise_similarity(kind, X, Y, a=0.0, r=0.0, sigma=1.0, use_numba=None):
    impl = pairwise_similarity_nb if _pick(use_numba) else pairwise_similarity_np
    return impl(int(kind), _f64(X), _f64(Y), float(a), float(r), float(sigma))


def psgd_eps(X, y, B, eps, iters, use_numba=None):
    impl = psgd_eps_nb if _pick(use_numba) else psgd_eps_np
    return impl(_f64(X), _f64(y), float(B), float(eps), int(iters))


def psgd_margin(X, lo, hi, B, gamma, iters, use_numba=None):
    impl = psgd_margin_nb if _pick(use_numba) else psgd_margin_np
    return impl(_f64(X), _f64(lo), _f64(hi), float(B), float(gamma), int(iters))


def _pick(use_numba):
    if use_numba is None:
        return _accel.USE_NUMBA
    return bool(use_numba) and _accel.numba is not None
