import itertools

import numpy as np
import pytest

from simland.dense_reg import LinearModel
from simland.errors import ConfigError, DataError
from simland.sparse_reg import FgsConfig, _Risk, default_sparsity, fit_fgs, sparsity


def test_default_k():
    assert default_sparsity(1.0, 1.0) == 8
    assert FgsConfig(c_w=1.0, epsilon_tol=1.0).k == 8
    assert FgsConfig(c_w=2.0, epsilon_tol=0.5).k == 128
    assert FgsConfig(max_sparsity=5).k == 5


def test_zero_targets_stop_immediately(rng):
    X = rng.uniform(-1, 1, size=(10, 4))
    cfg = FgsConfig(surrogate="smoothed-eps", variant="plain", epsilon_tol=0.01)
    m, trace = fit_fgs(X, np.zeros(10), cfg)
    assert not m.w.any()
    assert trace.delta == [0.0]
    assert sparsity(m) == 0


def test_one_dimensional_fully_corrective():
    cfg = FgsConfig(c_w=1.0, surrogate="squared", variant="fully-corrective", epsilon_tol=1e-9, max_sparsity=5)
    m, trace = fit_fgs([[1.0]], [0.9], cfg)
    assert np.flatnonzero(m.w).tolist() == [0]
    assert m.w[0] == pytest.approx(0.9)
    assert m.objective < 1e-6


def test_sparsity_counts(rng):
    assert sparsity(LinearModel(np.zeros(3), 1.0)) == 0
    assert sparsity(LinearModel(np.array([0.0, 3.0, 0.0]), 1.0)) == 1
    w = rng.normal(size=20) * (rng.uniform(size=20) < 0.4)
    assert sparsity(w) == sum(1 for v in w if abs(v) > 1e-12)


@pytest.mark.parametrize("surrogate", ["squared", "smoothed-eps"])
def test_risk_gradient_matches_finite_differences(surrogate, rng):
    X = rng.uniform(-1, 1, size=(15, 4))
    y = rng.normal(size=15)
    risk = _Risk(X, y, FgsConfig(surrogate=surrogate, beta=5.0, loss_epsilon=0.1))
    w = rng.normal(size=4) * 0.3
    g = risk.grad(w)
    h = 1e-6
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        fd = (risk.value(w + e) - risk.value(w - e)) / (2 * h)
        assert fd == pytest.approx(g[j], rel=1e-5, abs=1e-8)


@pytest.mark.parametrize("variant", ["plain", "fully-corrective"])
@pytest.mark.parametrize("surrogate", ["squared", "smoothed-eps"])
def test_trace_invariants(variant, surrogate):
    gen = np.random.default_rng(11)
    for _ in range(10):
        d = int(gen.integers(2, 12))
        X = gen.uniform(-1, 1, size=(20, d))
        y = gen.normal(size=20)
        cfg = FgsConfig(c_w=1.5, epsilon_tol=0.01, beta=10.0, variant=variant, surrogate=surrogate,
                        max_sparsity=30, loss_epsilon=0.05)
        m, tr = fit_fgs(X, y, cfg)
        assert len(tr) <= cfg.k
        for t, w in zip(tr.t, tr.weights):
            assert np.abs(w).sum() <= 1.5 + 1e-9
            assert np.count_nonzero(w) <= t
        assert np.all(np.array(tr.delta) >= -1e-12)
        assert sparsity(m) <= min(len(tr), cfg.k)


def test_plain_objective_monotone():
    gen = np.random.default_rng(5)
    for _ in range(10):
        X = gen.uniform(-1, 1, size=(25, 6))
        y = gen.normal(size=25)
        cfg = FgsConfig(c_w=2.0, epsilon_tol=1e-4, variant="plain", surrogate="smoothed-eps",
                        beta=20.0, loss_epsilon=0.05, max_sparsity=200)
        _, tr = fit_fgs(X, y, cfg)
        obj = np.array(tr.objective)
        eta = np.array(tr.eta)
        steps = np.flatnonzero(eta[:-1] < 1)
        assert np.all(obj[steps + 1] <= obj[steps] + 1e-12)


def grid_minimum(risk, d, c_w, step=0.05):
    ticks = np.arange(-c_w, c_w + step / 2, step)
    best = np.inf
    for head in itertools.product(ticks, repeat=d - 1) if d > 1 else [()]:
        head = np.array(head)
        rest = c_w - np.abs(head).sum()
        if rest < -1e-12:
            continue
        last = ticks[np.abs(ticks) <= rest + 1e-12]
        W = np.column_stack([np.tile(head, (last.size, 1)), last]) if d > 1 else last[:, None]
        F = risk.X @ W.T
        if risk.cfg.surrogate == "squared":
            vals = ((F - risk.y[:, None]) ** 2).mean(axis=0)
        else:
            from simland.loss import smoothed_eps
            vals = smoothed_eps(F, risk.y[:, None], risk.cfg.loss_epsilon, risk.cfg.beta).mean(axis=0)
        best = min(best, float(vals.min()))
    return best


@pytest.mark.parametrize("variant", ["plain", "fully-corrective"])
def test_beats_grid_search_small_problems(variant):
    gen = np.random.default_rng(2)
    for d in (1, 2, 3):
        X = gen.uniform(-1, 1, size=(12, d))
        y = X @ gen.uniform(-0.6, 0.6, size=d) + 0.1 * gen.normal(size=12)
        cfg = FgsConfig(c_w=1.0, epsilon_tol=0.02, variant=variant, surrogate="squared")
        m, _ = fit_fgs(X, y, cfg)
        assert m.objective <= grid_minimum(_Risk(X, y, cfg), d, 1.0) + cfg.epsilon_tol


def test_trace_csv(tmp_path, rng):
    X = rng.uniform(-1, 1, size=(10, 3))
    _, tr = fit_fgs(X, rng.normal(size=10), FgsConfig(max_sparsity=3, epsilon_tol=1e-9))
    path = tmp_path / "trace.csv"
    tr.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,r_t,delta_t,eta_t,objective"
    assert len(lines) == len(tr) + 1


def test_errors():
    with pytest.raises(ConfigError):
        FgsConfig(c_w=0)
    with pytest.raises(ConfigError):
        FgsConfig(variant="lazy")
    with pytest.raises(DataError):
        fit_fgs(np.empty((0, 2)), [])
