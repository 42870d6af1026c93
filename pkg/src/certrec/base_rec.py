"""Base recommender algorithms trained on user submatrices.

Two interchangeable algorithms: item-neighborhood scoring over cosine
similarities (ir) and pairwise-ranking matrix factorization (bpr). A model
trained on a submatrix answers recommend() only for users inside it; items
unseen in the submatrix are never recommended because neither algorithm has
any signal for them. All ranking ties break by ascending item id so that
ensembles built from these models are exactly reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .ratings import RatingMatrix


@dataclass(frozen=True)
class IRParams:
    k: int = 50  # neighbors kept per item


@dataclass(frozen=True)
class BPRParams:
    d: int = 16
    epochs: int = 30
    learn_rate: float = 0.05
    reg: float = 0.01
    neg_samples: int = 1
    seed: int = 0


@dataclass(frozen=True)
class BaseModel:
    """Trained state of one base recommender; immutable, query-safe."""

    algo: str                    # "ir" or "bpr"
    users: np.ndarray            # sorted user ids present in the submatrix
    seen_items: np.ndarray       # items rated by >=1 submatrix user (candidate pool)
    sub: csr_matrix              # s x m submatrix of ratings (row order == users)
    sim: csr_matrix | None = None        # ir: item x item top-k cosine table
    user_factors: np.ndarray | None = None  # bpr: s x d
    item_factors: np.ndarray | None = None  # bpr: m x d
    _row_of: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_row_of",
                           {int(u): r for r, u in enumerate(self.users)})

    def row_of(self, user: int) -> int | None:
        return self._row_of.get(int(user))


def _ranked(candidates: np.ndarray, scores: np.ndarray, n_prime: int) -> list[int]:
    # descending score, ascending item id on ties
    order = np.lexsort((candidates, -scores))
    return [int(i) for i in candidates[order[:n_prime]]]


def train_ir(matrix: RatingMatrix, users: np.ndarray, params: IRParams = IRParams()) -> BaseModel:
    """Item-neighborhood model: cosine similarity between item rating columns.

    Only the k most similar items are kept per item; the predicted score for
    (u, i) sums sim(i, j) * score(u, j) over the rated neighbors j of i.
    """
    users = np.asarray(sorted(int(u) for u in users), dtype=np.int64)
    if users.size == 0:
        raise ValueError("submatrix must contain at least one user")
    sub = matrix.csr[users].tocsr()
    m = matrix.n_items
    norms = np.sqrt(np.asarray(sub.power(2).sum(axis=0)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros(m), where=norms > 0)
    gram = (sub.T @ sub).tocsr()
    sim = gram.multiply(inv[:, None]).multiply(inv[None, :]).tocsr()
    # prune each item's neighbor list to the top-k similarities (self excluded)
    k = params.k
    indptr = [0]
    idx_parts, val_parts = [], []
    for i in range(m):
        lo, hi = sim.indptr[i], sim.indptr[i + 1]
        cols = sim.indices[lo:hi]
        vals = sim.data[lo:hi]
        not_self = cols != i
        cols = cols[not_self]
        vals = vals[not_self]
        if len(cols) > k:
            keep = np.lexsort((cols, -vals))[:k]
            keep.sort()  # column order within the row
            cols = cols[keep]
            vals = vals[keep]
        idx_parts.append(cols)
        val_parts.append(vals)
        indptr.append(indptr[-1] + len(cols))
    topk = csr_matrix(
        (np.concatenate(val_parts) if val_parts else np.empty(0),
         np.concatenate(idx_parts) if idx_parts else np.empty(0, dtype=np.int32),
         np.asarray(indptr)),
        shape=(m, m))
    seen = np.flatnonzero(sub.getnnz(axis=0))
    return BaseModel(algo="ir", users=users, seen_items=seen, sub=sub, sim=topk)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def bpr_pair_loss(pu: np.ndarray, qi: np.ndarray, qj: np.ndarray, reg: float) -> float:
    """Negated per-triple objective: -ln sigmoid(x_ui - x_uj) + reg * ||theta||^2."""
    diff = float(pu @ qi - pu @ qj)
    # -log(sigmoid(diff)) computed stably for either sign
    loss = math.log1p(math.exp(-abs(diff))) + max(-diff, 0.0)
    penalty = reg * (pu @ pu + qi @ qi + qj @ qj)
    return loss + float(penalty)


def bpr_pair_grads(pu: np.ndarray, qi: np.ndarray, qj: np.ndarray, reg: float):
    """Gradients of bpr_pair_loss w.r.t. (pu, qi, qj)."""
    diff = float(pu @ qi - pu @ qj)
    g = -_sigmoid(-diff)  # d/d(diff) of -ln sigmoid(diff)
    return (g * (qi - qj) + 2.0 * reg * pu,
            g * pu + 2.0 * reg * qi,
            -g * pu + 2.0 * reg * qj)


def train_bpr(matrix: RatingMatrix, users: np.ndarray, params: BPRParams = BPRParams()) -> BaseModel:
    """Pairwise-ranking factorization by SGD.

    Positives are the user's rated items in the submatrix; each positive draws
    negatives uniformly from the items the user has not rated (anywhere in the
    catalog). Fully deterministic for a fixed seed.
    """
    users = np.asarray(sorted(int(u) for u in users), dtype=np.int64)
    if users.size == 0:
        raise ValueError("submatrix must contain at least one user")
    sub = matrix.csr[users].tocsr()
    s, m = sub.shape
    rng = np.random.default_rng(params.seed)
    p = rng.normal(0.0, 0.1, size=(s, params.d))
    q = rng.normal(0.0, 0.1, size=(m, params.d))
    rated_sets = [frozenset(int(i) for i in sub.indices[sub.indptr[r]:sub.indptr[r + 1]])
                  for r in range(s)]
    pairs = np.array([(r, int(i))
                      for r in range(s)
                      for i in sub.indices[sub.indptr[r]:sub.indptr[r + 1]]
                      if len(rated_sets[r]) < m],  # no negatives exist otherwise
                     dtype=np.int64).reshape(-1, 2)
    lr = params.learn_rate
    reg = params.reg
    for _ in range(params.epochs):
        for r, i in pairs[rng.permutation(len(pairs))]:
            rated = rated_sets[r]
            for _ in range(params.neg_samples):
                j = int(rng.integers(m))
                while j in rated:
                    j = int(rng.integers(m))
                pu = p[r]
                diff = float(pu @ q[i] - pu @ q[j])
                g = _sigmoid(-diff)  # ascent weight on the ranking term
                pu_old = pu.copy()
                p[r] += lr * (g * (q[i] - q[j]) - 2.0 * reg * pu)
                q[i] += lr * (g * pu_old - 2.0 * reg * q[i])
                q[j] += lr * (-g * pu_old - 2.0 * reg * q[j])
    seen = np.flatnonzero(sub.getnnz(axis=0))
    return BaseModel(algo="bpr", users=users, seen_items=seen, sub=sub,
                     user_factors=p, item_factors=q)


def predicted_scores(model: BaseModel, user: int) -> np.ndarray | None:
    """Score vector over all m items for a present user, else None."""
    r = model.row_of(user)
    if r is None:
        return None
    if model.algo == "ir":
        x = np.zeros(model.sub.shape[1])
        lo, hi = model.sub.indptr[r], model.sub.indptr[r + 1]
        x[model.sub.indices[lo:hi]] = model.sub.data[lo:hi]
        return model.sim @ x
    return model.item_factors @ model.user_factors[r]


def recommend(model: BaseModel, user: int, n_prime: int) -> list[int]:
    """Top-n_prime unrated seen items for the user; [] if the user is absent."""
    if n_prime < 1:
        raise ValueError(f"n_prime must be >= 1, got {n_prime}")
    r = model.row_of(user)
    if r is None:
        return []
    scores = predicted_scores(model, user)
    lo, hi = model.sub.indptr[r], model.sub.indptr[r + 1]
    rated = model.sub.indices[lo:hi]
    candidates = np.setdiff1d(model.seen_items, rated, assume_unique=True)
    if candidates.size == 0:
        return []
    return _ranked(candidates, scores[candidates], n_prime)


def train_base(algo: str, matrix: RatingMatrix, users: np.ndarray, params) -> BaseModel:
    """Dispatch on the algorithm tag."""
    if algo == "ir":
        return train_ir(matrix, users, params if params is not None else IRParams())
    if algo == "bpr":
        return train_bpr(matrix, users, params if params is not None else BPRParams())
    raise ValueError(f"unknown base algorithm {algo!r}")
