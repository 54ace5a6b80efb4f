import numpy as np
import pytest
from hypothesis import given, strategies as st

from simland.errors import ConfigError, DataError
from simland.loss import psi_delta
from simland.ordinal import (OrdinalModel, fit_ordinal, fixed_thresholds, format_ordinal, label_from_score,
                             ordinal_errors, ordinal_objective, parse_ordinal, predict_label, round_to_label)
from simland.dense_reg import LinearModel


def test_fixed_thresholds():
    np.testing.assert_array_equal(fixed_thresholds(3), [1.0, 2.0])
    np.testing.assert_array_equal(fixed_thresholds(2), [1.0])
    assert np.all(np.diff(fixed_thresholds(10)) == 1.0)
    with pytest.raises(ConfigError):
        fixed_thresholds(1)


def test_objective_examples():
    b = fixed_thresholds(3)
    assert ordinal_objective([1.5], [[1.0]], [2], b, 0.25) == 0.0
    assert ordinal_objective([1.0], [[1.0]], [2], b, 0.25) == pytest.approx(0.25)
    assert ordinal_objective([1.0], [[0.5]], [1], b, 0.25) == 0.0
    assert ordinal_objective([1.0], [[-40.0]], [1], b, 0.25) == 0.0


def test_objective_rejects_bad_labels():
    with pytest.raises(DataError):
        ordinal_objective([1.0], [[1.0]], [4], fixed_thresholds(3), 0.25)


def _slab_ok(f, y, b, gamma):
    full = np.concatenate(([-np.inf], b, [np.inf]))
    return full[y - 1] + gamma <= f <= full[y] - gamma


def test_zero_objective_iff_slab_condition():
    gen = np.random.default_rng(0)
    b = fixed_thresholds(5)
    for _ in range(1000):
        f = gen.uniform(-1, 6)
        y = int(gen.integers(1, 6))
        obj = ordinal_objective([f], [[1.0]], [y], b, 0.25)
        assert (obj == 0.0) == _slab_ok(f, y, b, 0.25)


def test_predict_label_examples():
    m = OrdinalModel(LinearModel(np.array([1.0]), 1.0), fixed_thresholds(3), 0.25, 3)
    assert predict_label(m, [1.5]) == 2
    assert predict_label(m, [-100.0]) == 1
    assert predict_label(m, [100.0]) == 3
    assert predict_label(m, [1.0]) == 2  # f >= b_2


@given(st.floats(-20, 20), st.floats(-20, 20), st.integers(2, 12))
def test_predict_label_monotone(f1, f2, r):
    lo, hi = sorted((f1, f2))
    b = fixed_thresholds(r)
    l1, l2 = label_from_score(lo, b), label_from_score(hi, b)
    assert 1 <= l1 <= l2 <= r


def test_fit_separable_toy(kernel_path):
    X = np.array([[0.2], [1.8]])
    m = fit_ordinal(X, [1, 2], r=2, B=10.0, gamma=0.25)
    f = X[:, 0] * m.linear.w[0]
    assert f[0] < 1.0 <= f[1]
    preds = [predict_label(m, x) for x in X]
    assert ordinal_errors(preds, [1, 2]) == (0.0, 0.0)


def test_fit_single_label_reaches_zero(kernel_path):
    X = np.ones((4, 1))
    m = fit_ordinal(X, [2, 2, 2, 2], r=3, B=10.0, gamma=0.25, max_iters=3000)
    assert m.linear.objective == pytest.approx(0.0, abs=1e-9)
    assert 1.25 <= m.linear.w[0] <= 1.75


def test_fit_tiny_ball_collapses_to_first_label(rng):
    X = rng.normal(size=(30, 3))
    labels = rng.integers(1, 5, size=30)
    m = fit_ordinal(X, labels, r=4, B=1e-9)
    assert set(int(predict_label(m, x)) for x in X) == {1}


def test_fit_never_worse_than_zero(rng, kernel_path):
    X = rng.normal(size=(40, 5)) * 5
    labels = rng.integers(1, 6, size=40)
    b = fixed_thresholds(5)
    m = fit_ordinal(X, labels, r=5, B=50.0, max_iters=30)
    assert m.linear.objective <= ordinal_objective(np.zeros(5), X, labels, b, 0.25) + 1e-12
    assert np.linalg.norm(m.linear.w) <= 50 + 1e-9


def test_ordinal_errors():
    assert ordinal_errors([1, 2, 3], [1, 2, 3]) == (0.0, 0.0)
    assert ordinal_errors([1, 3], [2, 3]) == (0.5, 0.5)
    with pytest.raises(DataError):
        ordinal_errors([1], [1, 2])


def test_mislabel_at_most_aae():
    gen = np.random.default_rng(4)
    for _ in range(1000):
        n = int(gen.integers(1, 20))
        preds, labels = gen.integers(1, 8, size=n), gen.integers(1, 8, size=n)
        aae, mis = ordinal_errors(preds, labels)
        assert mis <= aae


def test_psi_unit_spacing_is_identity():
    bounds = np.linspace(0, 1, 11)
    np.testing.assert_allclose(psi_delta(bounds, fixed_thresholds(4)[1] - fixed_thresholds(4)[0]), bounds)


def test_round_baseline():
    np.testing.assert_array_equal(round_to_label([0.5, 1.5, 2.4, 9.0, -3.0], 3), [1, 2, 3, 3, 1])


def test_serialization_roundtrip():
    m = OrdinalModel(LinearModel(np.array([0.25, -1.5]), 3.0), fixed_thresholds(4), 0.25, 4)
    lines = format_ordinal(m)
    assert lines[-3:] == ["r=4", "gamma=0.25", "thresholds=1.0,2.0,3.0"]
    back = parse_ordinal(lines)
    np.testing.assert_array_equal(back.linear.w, m.linear.w)
    np.testing.assert_array_equal(back.thresholds, m.thresholds)
    assert (back.gamma, back.num_labels, back.spacing) == (0.25, 4, 1.0)


def test_threshold_validation():
    with pytest.raises(ConfigError):
        OrdinalModel(LinearModel(np.zeros(1), 1.0), np.array([2.0, 1.0]), 0.25, 3)
