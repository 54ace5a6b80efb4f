import itertools
import math

import numpy as np
import pytest

from simland.dense_reg import LinearModel
from simland.embedding import Embedder
from simland.errors import DataError
from simland.ranking import (RankingInstance, d_norm, decay, eta_targets, eval_ranking, fit_ranker, gain,
                             load_ranking_csv, ndcg_loss, score)
from simland.similarity import SimilaritySpec

# 30-digit mpmath constants
INV_LN2 = 1.442695040888963407359924681
LN2 = 0.693147180559945309417232121458
LN2_OVER_LN3 = 0.630929753571457437099527114343

IDENTITY_1D = Embedder([[1.0]], SimilaritySpec("linear"), "unscaled")


def brute_d_norm(v, log=math.log):
    m = len(v)
    return max(sum(v[i] / log(1 + pi[i]) for i in range(m)) for pi in itertools.permutations(range(1, m + 1)))


def brute_ndcg(s, r, log=math.log):
    order = sorted(range(len(s)), key=lambda i: (-s[i], i))
    pos = {doc: k + 1 for k, doc in enumerate(order)}
    g = [2 ** x - 1 for x in r]
    return -sum(g[i] / log(1 + pos[i]) for i in range(len(s))) / brute_d_norm(g, log)


def test_gain_decay():
    assert gain(0.0) == 0.0
    assert gain(1.0) == 1.0
    assert decay(1) == pytest.approx(LN2, rel=1e-15)


def test_d_norm_examples():
    assert d_norm([1.0, 0.0]) == pytest.approx(INV_LN2, rel=1e-15)
    assert d_norm([0.4]) == pytest.approx(0.4 * INV_LN2, rel=1e-15)


def test_d_norm_matches_permutations():
    gen = np.random.default_rng(0)
    for _ in range(200):
        v = gen.normal(size=int(gen.integers(1, 7))).tolist()
        assert abs(d_norm(v) - brute_d_norm(v)) <= 1e-12


def test_eta_targets():
    np.testing.assert_allclose(eta_targets([1.0, 0.0]), [LN2, 0.0], rtol=1e-15)
    r = np.array([0.2, 0.9, 0.5, 0.0])
    perm = np.array([2, 0, 3, 1])
    np.testing.assert_allclose(eta_targets(r[perm]), eta_targets(r)[perm], rtol=1e-15)
    eq = eta_targets([0.5, 0.5, 0.5])
    assert np.all(eq == eq[0])
    with pytest.raises(DataError):
        eta_targets([0.0, 0.0])


def test_ndcg_examples():
    assert ndcg_loss([1.0, 0.0], [1.0, 0.0]) == pytest.approx(-1.0, abs=1e-15)
    assert ndcg_loss([0.0, 1.0], [1.0, 0.0]) == pytest.approx(-LN2_OVER_LN3, abs=1e-12)
    assert ndcg_loss([10.0, -3.0, -4.0], [1.0, 0.5, 0.2]) == pytest.approx(-1.0, abs=1e-15)
    with pytest.raises(DataError):
        ndcg_loss([1.0, 2.0], [0.0, 0.0])


def test_ndcg_matches_oracle_and_bounds():
    gen = np.random.default_rng(1)
    for _ in range(200):
        m = int(gen.integers(1, 7))
        s, r = gen.normal(size=m), gen.uniform(0, 1, size=m)
        val = ndcg_loss(s, r)
        assert val == pytest.approx(brute_ndcg(s.tolist(), r.tolist()), abs=1e-12)
        assert -1 - 1e-12 <= val <= 0
        assert val == pytest.approx(brute_ndcg(s.tolist(), r.tolist(), log=math.log2), abs=1e-12)


def test_ndcg_affine_invariance():
    gen = np.random.default_rng(2)
    for _ in range(100):
        s, r = gen.normal(size=6), gen.uniform(0, 1, size=6)
        a, c = np.exp(gen.normal()), gen.normal() * 5
        assert ndcg_loss(a * s + c, r) == pytest.approx(ndcg_loss(s, r), abs=1e-15)


def test_fit_ranker_1d():
    inst = RankingInstance("q", [[1.0], [0.0]], [1.0, 0.0])
    model = fit_ranker([inst], IDENTITY_1D, B=10.0, max_iters=500)
    assert model.w[0] == pytest.approx(LN2, abs=1e-9)
    assert eval_ranking(model, [inst]) == pytest.approx(-1.0)


def test_equal_relevance_any_order():
    inst = RankingInstance("q", [[0.3], [0.1], [0.9]], [0.5, 0.5, 0.5])
    assert eval_ranking(LinearModel(np.array([-1.0]), 1.0, embedder=IDENTITY_1D), [inst]) == pytest.approx(-1.0)


def test_fit_ranker_errors_and_skip():
    with pytest.raises(DataError):
        fit_ranker([], IDENTITY_1D)
    good = RankingInstance("a", [[1.0], [0.0]], [1.0, 0.0])
    dead = RankingInstance("b", [[1.0], [0.0]], [0.0, 0.0])
    model = fit_ranker([good, dead], IDENTITY_1D, max_iters=50)
    assert model.diagnostics["skipped_instances"] == 1


def test_eval_is_mean_of_instances(rng):
    emb = Embedder(rng.normal(size=(3, 2)), SimilaritySpec("gaussian", {"sigma": 1.0}), "scaled")
    insts = [RankingInstance(str(i), rng.normal(size=(5, 2)), rng.uniform(size=5)) for i in range(4)]
    model = LinearModel(rng.normal(size=3), 5.0, embedder=emb)
    loop = np.mean([ndcg_loss(score(model, i), i.relevance) for i in insts])
    assert eval_ranking(model, insts) == pytest.approx(loop, abs=1e-15)
    assert eval_ranking(model, insts[:1]) == pytest.approx(ndcg_loss(score(model, insts[0]), insts[0].relevance))


def test_load_ranking_csv(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("qid,f1,f2,rel\n1,0.1,0.2,2\n1,0.3,0.1,4\n2,1,1,0.5\n")
    insts = load_ranking_csv(path)
    assert [i.qid for i in insts] == ["1", "2"]
    np.testing.assert_allclose(insts[0].relevance, [0.5, 1.0])
    assert insts[1].m == 1
    (tmp_path / "bad.csv").write_text("1,0.1,2\n1,0.3\n")
    with pytest.raises(DataError):
        load_ranking_csv(tmp_path / "bad.csv")
