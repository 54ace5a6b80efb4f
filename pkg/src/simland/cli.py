"""Command-line front end: ``simland {bench,train,predict,eval}``.

Exit codes: 0 success, 1 config error, 2 data error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import data as D
from .baseline import KrModel, kr_predict_all
from .bench import ExperimentConfig, emit, load_dataset, resolve_kernel, run_bench, summarize
from .dense_reg import fit_dense, format_linear, parse_linear, predict_all, select_bound
from .embedding import Embedder, embed_all, select_landmarks
from .errors import ConfigError, DataError, NumericError, SimlandError
from .ordinal import (fit_ordinal, format_ordinal, ordinal_errors, parse_ordinal, predict_labels,
                      round_to_label, slab_centers)
from .ranking import eval_ranking, fit_ranker
from .similarity import SimilaritySpec
from .sparse_reg import FgsConfig, fit_fgs

log = logging.getLogger("simland")

# flag name -> (config key, type)
_OVERRIDES = {
    "dataset": ("dataset", str),
    "task": ("task", str),
    "kernel": ("kernel", str),
    "methods": ("methods", lambda s: [m for m in s.split(",") if m]),
    "landmarks": ("landmarks", lambda s: [int(v) for v in s.split(",") if v]),
    "splits": ("num_splits", int),
    "test_fraction": ("test_fraction", float),
    "B": ("B", float),
    "epsilon": ("epsilon", float),
    "gamma": ("gamma", float),
    "c_w": ("c_w", float),
    "k": ("k", int),
    "iters": ("iters", int),
    "bins": ("bins", int),
    "landmark_mode": ("landmark_mode", str),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig keys")
    p.add_argument("--seed", type=int)
    p.add_argument("--paper-defaults", action="store_true",
                   help="data-driven kernel parameters, 5 splits, 50 landmarks in the sweep")
    p.add_argument("--dataset")
    p.add_argument("--task", choices=("regression", "ordinal", "ranking"))
    p.add_argument("--kernel")
    p.add_argument("--methods", help="comma-separated subset of kr,regland,regland-sp,orland,rank")
    p.add_argument("--landmarks", help="comma-separated landmark counts")
    p.add_argument("--splits", type=str)
    p.add_argument("--test-fraction", dest="test_fraction", type=str)
    p.add_argument("--B", type=str)
    p.add_argument("--epsilon", type=str)
    p.add_argument("--gamma", type=str)
    p.add_argument("--c-w", dest="c_w", type=str)
    p.add_argument("--k", type=str)
    p.add_argument("--iters", type=str)
    p.add_argument("--bins", type=str)
    p.add_argument("--landmark-mode", dest="landmark_mode")
    p.add_argument("-v", "--verbose", action="store_true")


def build_config(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    for flag, (key, conv) in _OVERRIDES.items():
        val = getattr(args, flag, None)
        if val is not None:
            try:
                raw[key] = conv(val)
            except ValueError as exc:
                raise ConfigError(f"--{flag}: {exc}") from None
    if args.seed is not None:
        raw["seed"] = args.seed
    try:
        cfg = ExperimentConfig(**{k: v for k, v in raw.items()})
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if args.paper_defaults:
        cfg.paper_defaults()
    cfg.validate()
    return cfg


# -- bench -----------------------------------------------------------------------


def cmd_bench(args) -> int:
    cfg = build_config(args)
    records = run_bench(cfg)
    if args.format == "plotdata":
        emit(summarize(records), args.out, "plotdata")
    else:
        emit(records, args.out, "csv")
    if args.summary:
        emit(summarize(records), args.summary, "csv")
    for s in summarize(records):
        print(f"{s.dataset} {s.kernel} {s.method} d={s.landmarks} {s.metric}={s.mean:.4g} (std {s.std:.2g}, n={s.n})")
    return 0


# -- train / predict / eval ---------------------------------------------------------


def cmd_train(args) -> int:
    cfg = build_config(args)
    method = cfg.methods[0]
    ds = load_dataset(cfg)
    fmode = "none" if cfg.kernel == "precomputed" else cfg.feature_scaling
    tmode = cfg.target_scaling if cfg.task == "regression" else "none"
    ds, params = D.scale(ds, fmode, tmode)
    spec = resolve_kernel(cfg, ds.features, D.sub_seed(cfg.seed, 0, "sigma"))
    meta = {"method": method, "task": cfg.task, "spec": spec.to_dict(), "scale": params.to_dict()}
    if cfg.task == "ordinal":
        meta["num_labels"] = ds.num_labels
        if ds.label_values is not None:
            meta["label_values"] = [float(v) for v in ds.label_values]

    if method == "kr":
        meta["kr"] = {"features": ds.features.tolist(), "targets": ds.targets.tolist(),
                      "num_labels": ds.num_labels if cfg.task == "ordinal" else None}
        _write_bundle(args.out, [f"simland-kr v1 n={ds.n}"], meta)
        return 0

    d = cfg.landmarks[-1]
    pool = select_landmarks(ds.features, d, spec, mode=cfg.landmark_mode,
                            seed=D.sub_seed(cfg.seed, 0, "landmarks"))
    labeled = ds
    if cfg.landmark_mode == "unlabeled-pool" and ds.n > d:
        labeled = ds.subset(np.setdiff1d(np.arange(ds.n), pool.indices))
    meta["embedder"] = {"landmarks": pool.landmarks.tolist(), "normalization": pool.normalization}

    if method == "regland-sp":
        emb = pool.with_normalization("unscaled")
        meta["embedder"]["normalization"] = "unscaled"
        fcfg = FgsConfig(c_w=cfg.c_w, epsilon_tol=cfg.fgs_tol, beta=cfg.beta, max_sparsity=cfg.k or d,
                         variant=cfg.fgs_variant, surrogate=cfg.fgs_surrogate, loss_epsilon=cfg.epsilon)
        model, _ = fit_fgs(embed_all(emb, labeled.features), labeled.targets, fcfg)
        lines = format_linear(model)
    elif method == "orland":
        model = fit_ordinal(embed_all(pool, labeled.features), labeled.targets, ds.num_labels,
                            B=cfg.B, gamma=cfg.gamma, max_iters=cfg.iters)
        lines = format_ordinal(model)
    elif method == "rank":
        from .bench import _instances
        model = fit_ranker(_instances(labeled), pool, B=cfg.B, max_iters=cfg.iters)
        lines = format_linear(model)
    else:
        Z = embed_all(pool, labeled.features)
        y = slab_centers(labeled.targets) if cfg.task == "ordinal" else labeled.targets
        B = select_bound(Z, y, cfg.epsilon, max_iters=cfg.iters) if cfg.select_B else cfg.B
        model = fit_dense(Z, y, B=B, eps=cfg.epsilon, max_iters=cfg.iters)
        lines = format_linear(model)
    _write_bundle(args.out, lines, meta)
    return 0


def _write_bundle(path, lines, meta) -> None:
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        with open(path + ".json", "w") as fh:
            json.dump(meta, fh, indent=1, sort_keys=True)
    except OSError as exc:
        raise ConfigError(f"cannot write model {path}: {exc}") from None


def _read_bundle(path):
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        with open(path + ".json") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read model {path}: {exc}") from None
    return lines, meta


def _predict_bundle(lines, meta, ds: D.Dataset) -> np.ndarray:
    """Predictions in original target units (original label values for ordinal tasks)."""
    pred = _predict_internal(lines, meta, ds)
    if meta["task"] == "ordinal" and meta.get("label_values"):
        pred = np.asarray(meta["label_values"])[pred.astype(int) - 1]
    return pred


def _predict_internal(lines, meta, ds):
    spec = SimilaritySpec.from_dict(meta["spec"])
    params = D.ScaleParams.from_dict(meta["scale"])
    X = params.apply(ds).features
    method, task = meta["method"], meta["task"]
    if method == "kr":
        kr = meta["kr"]
        ordinal = task == "ordinal"
        m = KrModel(np.array(kr["features"]), np.array(kr["targets"]), spec, ordinal, kr["num_labels"])
        return params.inverse_targets(kr_predict_all(m, X))
    emb = Embedder(np.array(meta["embedder"]["landmarks"]), spec, meta["embedder"]["normalization"])
    Z = embed_all(emb, X)
    if method == "orland":
        return predict_labels(parse_ordinal(lines), Z).astype(float)
    model, _ = parse_linear(lines)
    f = predict_all(model, Z)
    if task == "ordinal":
        return round_to_label(f, meta["num_labels"]).astype(float)
    return params.inverse_targets(f)


def _load_eval_data(path) -> D.Dataset:
    try:
        return D.load_csv(path, task="regression")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def cmd_predict(args) -> int:
    lines, meta = _read_bundle(args.model)
    if meta["method"] == "rank":
        raise ConfigError("use `eval` for ranking models")
    ds = _load_eval_data(args.data)
    pred = _predict_bundle(lines, meta, ds)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        wr = csv.writer(out, lineterminator="\n")
        wr.writerow(["prediction"])
        for v in pred:
            wr.writerow([repr(float(v))])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_eval(args) -> int:
    lines, meta = _read_bundle(args.model)
    task = meta["task"]
    if meta["method"] == "rank":
        from .bench import _instances, _load_ranking_dataset
        ds = _load_ranking_dataset(args.data)
        spec = SimilaritySpec.from_dict(meta["spec"])
        params = D.ScaleParams.from_dict(meta["scale"])
        ds = params.apply(ds)
        emb = Embedder(np.array(meta["embedder"]["landmarks"]), spec, meta["embedder"]["normalization"])
        model, _ = parse_linear(lines)
        result = {"ndcg": eval_ranking(model, _instances(ds), emb)}
    else:
        ds = _load_eval_data(args.data)
        pred = _predict_bundle(lines, meta, ds)
        if task == "ordinal":
            aae, mis = ordinal_errors(pred, ds.targets)
            result = {"aae": aae, "mislabel": mis}
        else:
            y = ds.targets
            result = {"mse": float(np.mean((pred - y) ** 2))}
            params = D.ScaleParams.from_dict(meta["scale"])
            if params.target_mode == "minmax01" and params.y_range > 0:
                result["mse_scaled"] = result["mse"] / params.y_range ** 2
    if not all(np.isfinite(v) for v in result.values()):
        raise NumericError(f"non-finite evaluation result {result}")
    for k, v in result.items():
        print(f"{k}={v!r}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(result, fh, sort_keys=True)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simland", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="landmark sweep over random splits")
    _add_common(p)
    p.add_argument("--out", required=True, help="results file")
    p.add_argument("--format", choices=("csv", "plotdata"), default="csv")
    p.add_argument("--summary", help="also write a mean/std summary CSV here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("train", help="fit one model on a CSV")
    _add_common(p)
    p.add_argument("--out", required=True, help="model file (a .json sidecar is written next to it)")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="CSV in training layout (last column ignored)")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score a trained model on labelled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SimlandError as exc:
        print(f"simland: {exc}", file=sys.stderr)
        return exc.exit_code
    except FloatingPointError as exc:
        print(f"simland: numeric failure: {exc}", file=sys.stderr)
        return NumericError.exit_code


if __name__ == "__main__":
    sys.exit(main())
