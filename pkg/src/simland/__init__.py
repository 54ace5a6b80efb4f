"""Supervised learning from arbitrary, possibly indefinite, similarity functions via landmarking."""
from ._accel import USE_NUMBA
from .baseline import KrModel, kr_fit, kr_predict, kr_predict_all
from .data import Dataset, ScaleParams, equifreq_bin, load_csv, rng, scale, split, sub_seed
from .dense_reg import LinearModel, fit_dense, predict, predict_all
from .embedding import Embedder, embed, embed_all, select_landmarks
from .errors import ConfigError, DataError, NumericError, SimlandError
from .ordinal import OrdinalModel, fit_ordinal, fixed_thresholds, ordinal_errors, ordinal_objective, predict_label
from .ranking import RankingInstance, d_norm, eta_targets, eval_ranking, fit_ranker, ndcg_loss
from .similarity import SimilaritySpec, default_params, evaluate, similarity_matrix, similarity_row
from .sparse_reg import FgsConfig, FgsTrace, fit_fgs, sparsity

__version__ = "0.1.0"
