"""Benchmark harness: landmark sweeps over random splits, one record per cell."""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import data as D
from .baseline import kr_fit, kr_predict_all
from .dense_reg import fit_dense, predict_all, select_bound
from .embedding import embed_all, select_landmarks
from .errors import ConfigError, DataError
from .ordinal import fit_ordinal, ordinal_errors, predict_labels, round_to_label, slab_centers
from .ranking import RankingInstance, eval_ranking, fit_ranker
from .similarity import KINDS, SimilaritySpec, default_params, load_precomputed
from .sparse_reg import FgsConfig, fit_fgs

log = logging.getLogger(__name__)

METHODS = ("kr", "regland", "regland-sp", "orland", "rank")
TASK_METHODS = {
    "regression": ("kr", "regland", "regland-sp"),
    "ordinal": ("kr", "regland", "orland"),
    "ranking": ("rank",),
}
TASK_METRICS = {
    "regression": ("mse",),
    "ordinal": ("aae", "mislabel"),
    "ranking": ("ndcg",),
}
DEFAULT_LANDMARKS = (5, 10, 20, 30, 40, 50)

CSV_FIELDS = ("dataset", "kernel", "method", "landmarks", "split", "metric", "value", "status")


@dataclass
class ExperimentConfig:
    dataset: str = ""
    dataset_name: str = ""
    task: str = "regression"
    has_header: str = "auto"
    kernel: str = "manhattan"
    kernel_params: dict | str = "auto"
    similarity_matrix: str = ""
    methods: list = field(default_factory=list)
    metrics: list = field(default_factory=list)
    landmarks: list = field(default_factory=lambda: list(DEFAULT_LANDMARKS))
    landmark_mode: str = "unlabeled-pool"
    num_splits: int = 5
    test_fraction: float = D.DEFAULT_TEST_FRACTION
    seed: int = 0
    B: float = 10.0
    select_B: bool = True
    epsilon: float = 0.01
    gamma: float = 0.25
    beta: float = 100.0
    c_w: float = 100.0
    k: int = 0  # 0: use the landmark count as the sparsity budget
    fgs_tol: float = 1e-6
    fgs_variant: str = "fully-corrective"
    fgs_surrogate: str = "squared"
    iters: int = 2000
    feature_scaling: str = "zscore"
    target_scaling: str = "minmax01"
    bins: int = 0  # 0: keep native integer labels
    max_rows: int = 0  # 0: use every row

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        if self.task not in TASK_METHODS:
            raise ConfigError(f"unknown task {self.task!r}")
        if not self.methods:
            self.methods = list(TASK_METHODS[self.task])
        if not self.metrics:
            self.metrics = list(TASK_METRICS[self.task][:1])
        for m in self.methods:
            if m not in TASK_METHODS[self.task]:
                raise ConfigError(f"method {m!r} is not available for task {self.task!r}")
        for m in self.metrics:
            if m not in TASK_METRICS[self.task]:
                raise ConfigError(f"metric {m!r} does not apply to task {self.task!r}")
        if self.kernel not in KINDS:
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        if self.kernel == "precomputed" and not self.similarity_matrix:
            raise ConfigError("precomputed kernel needs similarity_matrix")
        if not self.landmarks or any(int(d) < 1 for d in self.landmarks):
            raise ConfigError("landmark counts must be positive")
        self.landmarks = sorted({int(d) for d in self.landmarks})
        if self.num_splits < 1:
            raise ConfigError("num_splits must be >= 1")
        if not 0 < self.test_fraction < 1:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if self.landmark_mode not in ("unlabeled-pool", "double-dip"):
            raise ConfigError(f"unknown landmark_mode {self.landmark_mode!r}")
        if not self.dataset_name:
            self.dataset_name = os.path.splitext(os.path.basename(self.dataset))[0] or "dataset"

    def paper_defaults(self) -> None:
        """Sigmoid/gaussian parameters from data, 5 splits, 50 landmarks in the sweep."""
        self.kernel_params = "auto"
        self.num_splits = 5
        if 50 not in self.landmarks:
            self.landmarks = sorted(set(self.landmarks) | {50})


@dataclass(frozen=True)
class ResultRecord:
    dataset: str
    kernel: str
    method: str
    landmarks: int
    split: int
    metric: str
    value: float
    status: str = "ok"

    def row(self) -> list:
        value = "" if self.status != "ok" else repr(float(self.value))
        return [self.dataset, self.kernel, self.method, str(self.landmarks), str(self.split),
                self.metric, value, self.status]


# -- data preparation ----------------------------------------------------------------


def load_dataset(cfg: ExperimentConfig) -> D.Dataset:
    if not cfg.dataset:
        raise ConfigError("no dataset path given")
    try:
        if cfg.task == "ranking":
            ds = _load_ranking_dataset(cfg.dataset)
        else:
            ds = D.load_csv(cfg.dataset, cfg.has_header)
    except OSError as exc:
        raise DataError(f"cannot read {cfg.dataset}: {exc}") from None
    if cfg.max_rows and ds.n > cfg.max_rows:
        idx = np.sort(D.rng(D.sub_seed(cfg.seed, -1, "rows")).permutation(ds.n)[:cfg.max_rows])
        ds = ds.subset(idx, f"subsample {cfg.max_rows} rows")
    if cfg.task == "ordinal":
        if cfg.bins:
            ds = D.bin_dataset(ds, cfg.bins)
        else:
            if np.any(ds.targets != np.round(ds.targets)):
                raise DataError("ordinal task with non-integer targets needs bins > 0")
            ds = D.contiguous_labels(ds)
    return ds


def _load_ranking_dataset(path) -> D.Dataset:
    from .ranking import load_ranking_csv

    insts = load_ranking_csv(path)
    X = np.vstack([i.documents for i in insts])
    y = np.concatenate([i.relevance for i in insts])
    qid = np.concatenate([[n] * i.m for n, i in enumerate(insts)])
    return D.Dataset(X, y, task="ranking", provenance=(f"load ranking {path}",), qid=qid)


def _instances(ds: D.Dataset) -> list[RankingInstance]:
    out = []
    for q in np.unique(ds.qid):
        mask = ds.qid == q
        out.append(RankingInstance(str(q), ds.features[mask], ds.targets[mask]))
    return out


def resolve_kernel(cfg: ExperimentConfig, train_features, seed: int) -> SimilaritySpec:
    if cfg.kernel == "precomputed":
        return load_precomputed(cfg.similarity_matrix)
    if cfg.kernel_params == "auto" or cfg.kernel_params is None:
        return default_params(cfg.kernel, train_features, seed=seed)
    return SimilaritySpec(cfg.kernel, dict(cfg.kernel_params))


# -- one split -------------------------------------------------------------------------


def _run_split(cfg: ExperimentConfig, ds: D.Dataset, split_idx: int) -> list[ResultRecord]:
    train, test = D.split(ds, cfg.test_fraction, seed=D.sub_seed(cfg.seed, split_idx, "split"))
    fmode = "none" if cfg.kernel == "precomputed" else cfg.feature_scaling
    tmode = cfg.target_scaling if cfg.task == "regression" else "none"
    params = D.fit_scale(train, fmode, tmode)
    train, test = params.apply(train), params.apply(test)
    spec = resolve_kernel(cfg, train.features, D.sub_seed(cfg.seed, split_idx, "sigma"))
    kname = cfg.kernel

    cap = train.n if cfg.landmark_mode == "double-dip" else train.n - 1
    valid = [d for d in cfg.landmarks if d <= cap]
    records = []
    for d in cfg.landmarks:
        if d > cap:
            log.warning("split %d: %d landmarks exceed the available pool (%d); skipped", split_idx, d, cap)
            for method in cfg.methods:
                records.append(ResultRecord(cfg.dataset_name, kname, method, d, split_idx,
                                            cfg.metrics[0], float("nan"), "skipped"))
    if not valid:
        return records

    pool = select_landmarks(train.features, max(valid), spec, mode=cfg.landmark_mode,
                            seed=D.sub_seed(cfg.seed, split_idx, "landmarks"))
    if cfg.landmark_mode == "double-dip":
        labeled = train
    else:
        keep = np.setdiff1d(np.arange(train.n), pool.indices)
        labeled = train.subset(keep, f"drop {pool.d} landmark rows")

    def emit(method, d, values):
        for metric in cfg.metrics:
            records.append(ResultRecord(cfg.dataset_name, kname, method, d, split_idx,
                                        metric, float(values[metric])))

    if "kr" in cfg.methods:
        values = _eval_kr(cfg, labeled, test, spec)
        for d in valid:
            emit("kr", d, values)

    for d in valid:
        emb = pool.prefix(d)
        for method in cfg.methods:
            if method == "kr":
                continue
            emit(method, d, _eval_landmarked(cfg, method, emb, labeled, test))
    return records


def _regression_metrics(pred, y):
    return {"mse": float(np.mean((pred - y) ** 2))}


def _ordinal_metrics(pred, y):
    aae, mis = ordinal_errors(pred, y)
    return {"aae": aae, "mislabel": mis}


def _eval_kr(cfg, labeled, test, spec):
    if cfg.task == "ordinal":
        m = kr_fit(labeled.features, labeled.targets, spec, ordinal=True, num_labels=_num_labels(labeled, test))
        return _ordinal_metrics(kr_predict_all(m, test.features), test.targets)
    m = kr_fit(labeled.features, labeled.targets, spec)
    return _regression_metrics(kr_predict_all(m, test.features), test.targets)


def _num_labels(labeled, test) -> int:
    return int(max(labeled.targets.max(), test.targets.max()))


def _eval_landmarked(cfg, method, emb, labeled, test):
    if method == "regland-sp":
        emb_u = emb.with_normalization("unscaled")
        Xtr, Xte = embed_all(emb_u, labeled.features), embed_all(emb_u, test.features)
        fcfg = FgsConfig(c_w=cfg.c_w, epsilon_tol=cfg.fgs_tol, beta=cfg.beta,
                         max_sparsity=cfg.k or emb.d, variant=cfg.fgs_variant,
                         surrogate=cfg.fgs_surrogate, loss_epsilon=cfg.epsilon)
        model, _ = fit_fgs(Xtr, labeled.targets, fcfg)
        return _regression_metrics(predict_all(model, Xte), test.targets)

    if method == "rank":
        model = fit_ranker(_instances(labeled), emb, B=cfg.B, max_iters=cfg.iters)
        return {"ndcg": eval_ranking(model, _instances(test), emb)}

    Xtr, Xte = embed_all(emb, labeled.features), embed_all(emb, test.features)
    if method == "orland":
        r = _num_labels(labeled, test)
        model = fit_ordinal(Xtr, labeled.targets, r, B=cfg.B, gamma=cfg.gamma, max_iters=cfg.iters)
        return _ordinal_metrics(predict_labels(model, Xte), test.targets)

    # regland
    if cfg.task == "ordinal":
        r = _num_labels(labeled, test)
        B = select_bound(Xtr, slab_centers(labeled.targets), cfg.epsilon, max_iters=cfg.iters) if cfg.select_B else cfg.B
        model = fit_dense(Xtr, slab_centers(labeled.targets), B=B, eps=cfg.epsilon, max_iters=cfg.iters)
        return _ordinal_metrics(round_to_label(predict_all(model, Xte), r), test.targets)
    B = select_bound(Xtr, labeled.targets, cfg.epsilon, max_iters=cfg.iters) if cfg.select_B else cfg.B
    model = fit_dense(Xtr, labeled.targets, B=B, eps=cfg.epsilon, max_iters=cfg.iters)
    return _regression_metrics(predict_all(model, Xte), test.targets)


# -- driver ----------------------------------------------------------------------------


def thread_count() -> int:
    raw = os.environ.get("SIMLAND_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        raise ConfigError(f"SIMLAND_THREADS must be an integer, got {raw!r}") from None


def sort_records(records):
    order = {m: i for i, m in enumerate(METHODS)}
    return sorted(records, key=lambda r: (order.get(r.method, 99), r.method, r.landmarks, r.split, r.metric))


def run_bench(cfg: ExperimentConfig, ds: D.Dataset | None = None, threads: int | None = None) -> list[ResultRecord]:
    cfg.validate()
    if ds is None:
        ds = load_dataset(cfg)
    threads = thread_count() if threads is None else threads
    splits = range(cfg.num_splits)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda s: _run_split(cfg, ds, s), splits))
    else:
        chunks = [_run_split(cfg, ds, s) for s in splits]
    return sort_records([r for chunk in chunks for r in chunk])


# -- summaries and output ------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    dataset: str
    kernel: str
    method: str
    landmarks: int
    metric: str
    mean: float
    std: float
    n: int


def summarize(records) -> list[SummaryRow]:
    """Mean and (n-1)-denominator std per (dataset, kernel, method, landmarks, metric)."""
    groups: dict = {}
    for r in records:
        if r.status != "ok":
            continue
        groups.setdefault((r.dataset, r.kernel, r.method, r.landmarks, r.metric), []).append(r.value)
    out = []
    for key, vals in groups.items():
        v = np.array(vals, dtype=float)
        std = float(v.std(ddof=1)) if v.size > 1 else 0.0
        out.append(SummaryRow(*key, float(v.mean()), std, int(v.size)))
    order = {m: i for i, m in enumerate(METHODS)}
    return sorted(out, key=lambda s: (s.dataset, s.kernel, order.get(s.method, 99), s.method, s.metric, s.landmarks))


def emit(items, path, fmt: str = "csv") -> None:
    """Write records (``csv``) or a summary (``csv`` / ``plotdata``) to ``path``."""
    items = list(items)
    is_summary = bool(items) and isinstance(items[0], SummaryRow)
    if fmt == "plotdata":
        summary = items if is_summary else summarize(items)
        _write_plotdata(summary, path)
        return
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        if is_summary:
            wr.writerow(["dataset", "kernel", "method", "landmarks", "metric", "mean", "std", "n"])
            for s in items:
                wr.writerow([s.dataset, s.kernel, s.method, s.landmarks, s.metric,
                             repr(s.mean), repr(s.std), s.n])
        else:
            wr.writerow(CSV_FIELDS)
            for r in items:
                wr.writerow(r.row())


def _write_plotdata(summary, path) -> None:
    blocks: dict = {}
    for s in summary:
        blocks.setdefault((s.dataset, s.kernel, s.method, s.metric), []).append(s)
    with open(path, "w") as fh:
        parts = []
        for (ds, kern, meth, metric), rows in blocks.items():
            lines = [f"# {ds} {kern} {meth} {metric}"]
            lines += [f"{s.landmarks} {s.mean!r} {s.std!r}" for s in sorted(rows, key=lambda s: s.landmarks)]
            parts.append("\n".join(lines))
        fh.write("\n\n".join(parts) + ("\n" if parts else ""))


def read_records(path) -> list[ResultRecord]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        return [ResultRecord(row["dataset"], row["kernel"], row["method"], int(row["landmarks"]),
                             int(row["split"]), row["metric"],
                             float(row["value"]) if row["value"] else float("nan"), row["status"])
                for row in rd]


def read_plotdata(path) -> dict:
    out: dict = {}
    with open(path) as fh:
        text = fh.read()
    for block in filter(None, (b.strip() for b in text.split("\n\n"))):
        head, *rows = block.splitlines()
        key = tuple(head.lstrip("# ").split())
        out[key] = [tuple(float(v) for v in row.split()) for row in rows]
    return out
