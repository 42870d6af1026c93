"""Submatrix sampling, vote aggregation across T base models, and ensemble top-N.

Per-member seeds are derived by hashing (master_seed, t), so member t is
reproducible in isolation and vote counts are a pure sum of independent
per-member contributions: serial, parallel, chunked, and resumed builds all
produce identical counts.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .base_rec import BPRParams, IRParams, recommend, train_base
from .ratings import RatingMatrix, ParseError
from .ratings import _parse_header  # shared "#... v1 k=v" header grammar


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labels (independent of PYTHONHASHSEED)."""
    h = hashlib.blake2b(":".join(map(str, parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class SubmatrixSample:
    users: tuple  # sorted s distinct user ids
    seed: int     # derivation seed


@dataclass(frozen=True)
class VoteCounts:
    """counts[u][i] = number of the T base models whose top-N' for u includes i."""

    T: int
    n_prime: int
    s: int
    counts: np.ndarray  # n x m, int32
    master_seed: int
    algo: str

    @property
    def n(self) -> int:
        return int(self.counts.shape[0])

    @property
    def m(self) -> int:
        return int(self.counts.shape[1])


def sample_submatrix(n: int, s: int, seed: int) -> SubmatrixSample:
    """Uniform s-subset of the n users, without replacement, fixed by seed."""
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    rng = np.random.default_rng(seed)
    users = np.sort(rng.choice(n, size=s, replace=False))
    return SubmatrixSample(users=tuple(int(u) for u in users), seed=seed)


def _member_users(train_n: int, s: int, master_seed: int, t: int,
                  exhaustive_iter=None) -> tuple:
    if exhaustive_iter is not None:
        return next(exhaustive_iter)
    return sample_submatrix(train_n, s, derive_seed(master_seed, t)).users


def _member_params(algo: str, params, master_seed: int, t: int):
    if algo == "bpr":
        base = params if params is not None else BPRParams()
        return replace(base, seed=derive_seed(master_seed, t, "sgd"))
    return params if params is not None else IRParams()


def accumulate_votes(train: RatingMatrix, algo: str, params, s: int, n_prime: int,
                     master_seed: int, t_start: int, t_stop: int,
                     exhaustive: bool = False) -> np.ndarray:
    """Vote contributions of members t_start..t_stop-1 as an n x m count array."""
    n, m = train.n_users, train.n_items
    counts = np.zeros((n, m), dtype=np.int32)
    subset_iter = None
    if exhaustive:
        subset_iter = itertools.islice(
            itertools.combinations(range(n), s), t_start, t_stop)
    for t in range(t_start, t_stop):
        users = _member_users(n, s, master_seed, t, subset_iter)
        model = train_base(algo, train, np.asarray(users),
                           _member_params(algo, params, master_seed, t))
        for u in users:
            for i in recommend(model, u, n_prime):
                counts[u, i] += 1
    return counts


# process-pool plumbing: workers get the immutable inputs once via initializer
_POOL_CTX = {}


def _pool_init(train, algo, params, s, n_prime, master_seed, exhaustive):
    _POOL_CTX["args"] = (train, algo, params, s, n_prime, master_seed, exhaustive)


def _pool_range(span):
    train, algo, params, s, n_prime, master_seed, exhaustive = _POOL_CTX["args"]
    return accumulate_votes(train, algo, params, s, n_prime, master_seed,
                            span[0], span[1], exhaustive)


def _ranges(t_start: int, t_stop: int, pieces: int):
    total = t_stop - t_start
    pieces = max(1, min(pieces, total))
    step = math.ceil(total / pieces)
    return [(lo, min(lo + step, t_stop)) for lo in range(t_start, t_stop, step)]


def accumulate_votes_parallel(train, algo, params, s, n_prime, master_seed,
                              t_start, t_stop, threads: int,
                              exhaustive: bool = False) -> np.ndarray:
    """Same result as accumulate_votes; members are split across processes.

    Count addition is associative and commutative and member seeds do not
    depend on the executing worker, so the partition is invisible in the output.
    """
    if threads <= 1 or t_stop - t_start <= 1:
        return accumulate_votes(train, algo, params, s, n_prime, master_seed,
                                t_start, t_stop, exhaustive)
    total = np.zeros((train.n_users, train.n_items), dtype=np.int32)
    spans = _ranges(t_start, t_stop, threads * 4)
    with ProcessPoolExecutor(
            max_workers=threads, initializer=_pool_init,
            initargs=(train, algo, params, s, n_prime, master_seed, exhaustive)) as pool:
        for part in pool.map(_pool_range, spans):
            total += part
    return total


def build_vote_counts(train: RatingMatrix, algo: str, params, T: int, s: int,
                      n_prime: int, master_seed: int, threads: int = 1,
                      exhaustive: bool = False) -> VoteCounts:
    """Train T base models on sampled s-user submatrices and count their votes.

    exhaustive=True enumerates every C(n,s) subset exactly once in
    lexicographic order instead of sampling; T is then forced to C(n,s).
    """
    if exhaustive:
        T = math.comb(train.n_users, s)
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    counts = accumulate_votes_parallel(train, algo, params, s, n_prime,
                                       master_seed, 0, T, threads, exhaustive)
    return VoteCounts(T=T, n_prime=n_prime, s=s, counts=counts,
                      master_seed=master_seed, algo=algo)


def ensemble_recommend(counts: VoteCounts, train: RatingMatrix, user: int,
                       N: int) -> list[int]:
    """The N items with the most votes for this user, excluding train-rated ones.

    Ties break by ascending item id; zero-vote items fill the tail under the
    same tie-break so the result has exactly N items whenever N unrated items
    exist (the metrics divide by a fixed N). A catalog with fewer than N
    unrated items yields all of them.
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    row = counts.counts[user]
    mask = np.ones(counts.m, dtype=bool)
    mask[train.rated_items(user)] = False
    candidates = np.flatnonzero(mask)
    order = np.lexsort((candidates, -row[candidates]))
    return [int(i) for i in candidates[order[:N]]]


def save_votes(path: str, vc: VoteCounts) -> None:
    """Persist counts: header then u,i,count rows, zero counts omitted."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#votes v1 n={vc.n} m={vc.m} T={vc.T} s={vc.s} "
                 f"nprime={vc.n_prime} algo={vc.algo} seed={vc.master_seed}\n")
        rows, cols = np.nonzero(vc.counts)
        for u, i in zip(rows, cols):
            fh.write(f"{u},{i},{int(vc.counts[u, i])}\n")


def load_votes(path: str) -> VoteCounts:
    with open(path, "r", encoding="utf-8") as fh:
        header = _parse_header(fh.readline().rstrip("\n"), "#votes v1 ")
        n = int(header["n"])
        m = int(header["m"])
        counts = np.zeros((n, m), dtype=np.int32)
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            try:
                u_s, i_s, c_s = line.split(",")
                counts[int(u_s), int(i_s)] = int(c_s)
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    return VoteCounts(T=int(header["T"]), n_prime=int(header["nprime"]),
                      s=int(header["s"]), counts=counts,
                      master_seed=int(header["seed"]), algo=header["algo"])
