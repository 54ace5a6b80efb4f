import numpy as np
import pytest

from simland.baseline import kr_fit, kr_predict, kr_predict_all
from simland.errors import DataError
from simland.similarity import SimilaritySpec

GAUSS = SimilaritySpec("gaussian", {"sigma": 1.0})


def test_single_training_point(rng):
    m = kr_fit([[0.0, 1.0]], [3.5], SimilaritySpec("manhattan"))
    for x in rng.normal(size=(10, 2)):
        assert kr_predict(m, x) == pytest.approx(3.5)


@pytest.mark.parametrize("spec", [GAUSS, SimilaritySpec("manhattan"), SimilaritySpec("sigmoid", {"a": 0.5})])
def test_constant_targets(spec, rng):
    m = kr_fit(rng.normal(size=(20, 3)), np.full(20, -2.0), spec)
    np.testing.assert_allclose(kr_predict_all(m, rng.normal(size=(50, 3))), -2.0, rtol=1e-9)


def test_small_sigma_recovers_training_target(rng):
    X = rng.normal(size=(15, 2))
    y = rng.normal(size=15)
    m = kr_fit(X, y, SimilaritySpec("gaussian", {"sigma": 0.01}))
    np.testing.assert_allclose(kr_predict_all(m, X), y, atol=1e-9)


def test_positive_kernel_stays_in_range(rng):
    X, y = rng.normal(size=(30, 2)), rng.normal(size=30)
    pred = kr_predict_all(kr_fit(X, y, GAUSS), rng.normal(size=(200, 2)) * 2)
    assert pred.min() >= y.min() - 1e-12 and pred.max() <= y.max() + 1e-12


def test_matches_formula_loop(rng):
    X, y = rng.normal(size=(8, 2)), rng.normal(size=8)
    spec = SimilaritySpec("manhattan")
    x = rng.normal(size=2)
    k = [-np.abs(x - xi).sum() for xi in X]
    assert kr_predict(kr_fit(X, y, spec), x) == pytest.approx(np.dot(k, y) / np.sum(k), rel=1e-12)


def test_zero_denominator_falls_back_to_mean():
    X = np.array([[1.0], [-1.0]])
    m = kr_fit(X, [2.0, 4.0], SimilaritySpec("linear"))
    # K(x, 1) + K(x, -1) = 0 for every x
    assert kr_predict(m, [0.7]) == pytest.approx(3.0)


def test_ordinal_rounding_and_clamp(rng):
    X = rng.normal(size=(40, 2))
    y = rng.integers(1, 6, size=40).astype(float)
    m = kr_fit(X, y, SimilaritySpec("sigmoid", {"a": 0.5, "r": -1}), ordinal=True, num_labels=5)
    pred = kr_predict_all(m, rng.normal(size=(100, 2)) * 3)
    assert set(np.unique(pred)) <= {1.0, 2.0, 3.0, 4.0, 5.0}
    m2 = kr_fit([[0.0], [1.0]], [9.0, 9.0], GAUSS, ordinal=True, num_labels=3)
    assert kr_predict(m2, [0.5]) == 3.0


def test_validation():
    with pytest.raises(DataError):
        kr_fit(np.empty((0, 2)), [], GAUSS)
    with pytest.raises(DataError):
        kr_fit([[1.0]], [1.0, 2.0], GAUSS)
