import numpy as np
import pytest

from simland import _kernels as K


@pytest.mark.parametrize("kind", sorted(K.KIND_CODES))
def test_pairwise_paths_agree(kind, rng):
    X = rng.normal(size=(17, 5))
    Y = rng.normal(size=(11, 5))
    a = K.pairwise_similarity(K.KIND_CODES[kind], X, Y, a=0.2, r=-1.0, sigma=1.7, use_numba=True)
    b = K.pairwise_similarity(K.KIND_CODES[kind], X, Y, a=0.2, r=-1.0, sigma=1.7, use_numba=False)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_pairwise_against_loops(rng):
    X = rng.normal(size=(4, 3))
    Y = rng.normal(size=(5, 3))
    out = K.pairwise_similarity(K.MANHATTAN, X, Y)
    for i in range(4):
        for j in range(5):
            assert out[i, j] == pytest.approx(-sum(abs(X[i, k] - Y[j, k]) for k in range(3)), abs=1e-14)


def test_numpy_path_blocks_rows(rng, monkeypatch):
    monkeypatch.setattr(K, "_NP_BLOCK_ELEMS", 10)
    X = rng.normal(size=(9, 2))
    full = K.pairwise_similarity_nb(K.EUCLIDEAN, X, X, 0.0, 0.0, 1.0)
    np.testing.assert_allclose(K.pairwise_similarity_np(K.EUCLIDEAN, X, X, 0.0, 0.0, 1.0), full, atol=1e-12)


def test_psgd_eps_paths_agree(rng):
    X = rng.normal(size=(40, 6))
    y = X @ rng.normal(size=6) + 0.1 * rng.normal(size=40)
    nb = K.psgd_eps(X, y, 2.0, 0.05, 300, use_numba=True)
    np_ = K.psgd_eps(X, y, 2.0, 0.05, 300, use_numba=False)
    np.testing.assert_allclose(nb[0], np_[0], rtol=1e-8, atol=1e-10)
    assert nb[2] == pytest.approx(np_[2], rel=1e-8)
    np.testing.assert_allclose(nb[3], np_[3], rtol=1e-8)


def test_psgd_margin_paths_agree(rng):
    X = rng.normal(size=(40, 4))
    labels = rng.integers(1, 4, size=40)
    b = np.array([-np.inf, 1.0, 2.0, np.inf])
    lo, hi = b[labels - 1], b[labels]
    nb = K.psgd_margin(X, lo, hi, 3.0, 0.25, 300, use_numba=True)
    np_ = K.psgd_margin(X, lo, hi, 3.0, 0.25, 300, use_numba=False)
    np.testing.assert_allclose(nb[0], np_[0], rtol=1e-8, atol=1e-10)
    assert nb[2] == pytest.approx(np_[2], rel=1e-8)


def test_zero_design_returns_zero():
    X = np.zeros((3, 2))
    w_avg, w_best, obj, _ = K.psgd_eps(X, np.ones(3), 1.0, 0.0, 10)
    assert not w_avg.any() and not w_best.any()
    assert obj == pytest.approx(1.0)
