"""NDCG loss and a squared-surrogate ranker over query-document pairs.

Gain G(r) = 2^r - 1, decay F(t) = ln(1 + t). Each query-document pair is
regressed onto eta(r) = G(r) / ||G(r)||_D, where ||v||_D pairs the sorted
entries of v with 1/F(1), 1/F(2), ...
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .dense_reg import DEFAULT_BOUND, DEFAULT_ITERS, LinearModel
from .embedding import Embedder, embed_all
from .errors import ConfigError, DataError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RankingInstance:
    qid: str
    documents: np.ndarray  # (m, p) joint query-document features
    relevance: np.ndarray  # (m,)

    def __post_init__(self):
        docs = np.atleast_2d(np.asarray(self.documents, dtype=float))
        rel = np.asarray(self.relevance, dtype=float).ravel()
        if rel.size < 1 or docs.shape[0] != rel.size:
            raise DataError(f"query {self.qid}: {docs.shape[0]} documents, {rel.size} relevances")
        if not np.all(np.isfinite(rel)):
            raise DataError(f"query {self.qid}: non-finite relevance")
        object.__setattr__(self, "documents", docs)
        object.__setattr__(self, "relevance", rel)

    @property
    def m(self) -> int:
        return self.relevance.size


def gain(rel):
    return np.exp2(rel) - 1.0


def decay(t):
    t = np.asarray(t)
    if np.any(t < 1):
        raise ConfigError("positions start at 1")
    out = np.log1p(t)
    return float(out) if out.ndim == 0 else out


def d_norm(v) -> float:
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise DataError("empty vector")
    desc = -np.sort(-v)
    return float(np.sum(desc / np.log1p(np.arange(1, v.size + 1))))


def eta_targets(r) -> np.ndarray:
    g = gain(np.asarray(r, dtype=float))
    if not np.any(g > 0):
        raise DataError("no document has positive gain; targets undefined")
    return g / d_norm(g)


def ndcg_loss(s, r) -> float:
    s = np.asarray(s, dtype=float).ravel()
    r = np.asarray(r, dtype=float).ravel()
    if s.shape != r.shape:
        raise DataError(f"length mismatch: {s.shape} vs {r.shape}")
    g = gain(r)
    norm = d_norm(g)
    if not norm > 0:
        raise DataError("zero total gain; NDCG undefined")
    order = np.argsort(-s, kind="stable")
    pos = np.empty(s.size)
    pos[order] = np.arange(1, s.size + 1)
    return float(-np.sum(g / np.log1p(pos)) / norm)


def flatten(instances, embedder: Embedder):
    """Stack every usable pair into (X_embedded, eta targets); returns skipped count too."""
    Xs, ys, skipped = [], [], 0
    for inst in instances:
        if not np.any(gain(inst.relevance) > 0):
            skipped += 1
            continue
        Xs.append(embed_all(embedder, inst.documents))
        ys.append(eta_targets(inst.relevance))
    if not Xs:
        return np.empty((0, embedder.d)), np.empty(0), skipped
    return np.vstack(Xs), np.concatenate(ys), skipped


def fit_ranker(instances, embedder: Embedder, B: float = DEFAULT_BOUND,
               max_iters: int = DEFAULT_ITERS, seed: int = 0) -> LinearModel:
    """Projected gradient descent on the mean squared loss to eta targets, ||w||_2 <= B."""
    instances = list(instances)
    if not instances:
        raise DataError("no ranking instances")
    X, y, skipped = flatten(instances, embedder)
    if skipped:
        log.warning("skipped %d ranking instance(s) with zero total gain", skipped)
    if X.shape[0] == 0:
        raise DataError("every ranking instance has zero total gain")
    n = X.shape[0]
    lip = 2.0 * float(np.linalg.norm(X, 2)) ** 2 / n
    step = 1.0 / lip if lip > 0 else 0.0
    w = np.zeros(X.shape[1])
    for _ in range(max_iters):
        w = w - step * (2.0 / n) * (X.T @ (X @ w - y))
        nrm = float(np.linalg.norm(w))
        if nrm > B:
            w *= B / nrm
    obj = float(np.mean((X @ w - y) ** 2))
    return LinearModel(w=w, norm_bound=float(B), epsilon=0.0, embedder=embedder,
                       iterations=int(max_iters), objective=obj,
                       diagnostics={"skipped_instances": skipped})


def score(model: LinearModel, inst: RankingInstance, embedder: Embedder | None = None) -> np.ndarray:
    emb = embedder if embedder is not None else model.embedder
    return embed_all(emb, inst.documents) @ model.w


def eval_ranking(model: LinearModel, instances, embedder: Embedder | None = None) -> float:
    losses = [ndcg_loss(score(model, inst, embedder), inst.relevance)
              for inst in instances if np.any(gain(inst.relevance) > 0)]
    if not losses:
        raise DataError("no ranking instance with positive gain to evaluate")
    return float(np.mean(losses))


def load_ranking_csv(path, normalize: bool = True) -> list[RankingInstance]:
    """Columns ``qid, f1..fd, rel``; consecutive rows sharing a qid form one instance.

    With ``normalize`` each instance's relevances are divided by their maximum
    when that maximum exceeds 1.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DataError(f"{path}: empty ranking file")
    if rows[0][0].strip().lower() == "qid":
        rows = rows[1:]
    out, cur_q, feats, rels = [], None, [], []

    def flush():
        if cur_q is not None:
            rel = np.array(rels)
            if normalize and rel.max() > 1:
                rel = rel / rel.max()
            out.append(RankingInstance(cur_q, np.array(feats), rel))

    width = None
    for lineno, row in enumerate(rows, 1):
        if width is None:
            width = len(row)
        if len(row) != width or width < 3:
            raise DataError(f"{path}: ragged row {lineno}")
        try:
            vals = [float(v) for v in row[1:]]
        except ValueError:
            raise DataError(f"{path}: non-numeric cell in row {lineno}") from None
        q = row[0].strip()
        if q != cur_q:
            flush()
            cur_q, feats, rels = q, [], []
        feats.append(vals[:-1])
        rels.append(vals[-1])
    flush()
    return out
