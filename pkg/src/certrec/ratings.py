"""Rating data ingestion, the sparse rating matrix, and per-user train/test splits.

A rating matrix holds n users by m items with 0 meaning "not rated"; stored
scores are always nonzero. Loaders remap arbitrary external ids to contiguous
0-based internal ids and keep the mapping for output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix


class ParseError(ValueError):
    """Malformed input data; the message names the offending line."""


# format name -> field separator
_SEPARATORS = {
    "movielens-100k-tab": "\t",
    "movielens-dat-double-colon": "::",
    "generic-csv": ",",
}

FORMATS = tuple(_SEPARATORS)


@dataclass(frozen=True)
class RatingDomain:
    """Closed set of admissible rating scores; 0 is reserved for "unrated"."""

    lo: float
    hi: float
    integral: bool  # True: only integers in [lo, hi] are valid scores

    def accepts(self, score: float) -> bool:
        if not math.isfinite(score) or score == 0:
            return False
        if score < self.lo or score > self.hi:
            return False
        return not self.integral or float(score).is_integer()


# the two MovieLens formats declare 1..5 integer stars up front
_ML_DOMAIN = RatingDomain(lo=1.0, hi=5.0, integral=True)


@dataclass(frozen=True)
class RatingMatrix:
    """Immutable sparse user-item score matrix with id remapping tables."""

    n_users: int
    n_items: int
    csr: csr_matrix  # n_users x n_items, float64, zeros never stored
    domain: RatingDomain
    user_ids: np.ndarray  # internal row -> external user id
    item_ids: np.ndarray  # internal col -> external item id

    def rated_items(self, u: int) -> np.ndarray:
        """Internal ids of the items user u rated, ascending."""
        return self.csr.indices[self.csr.indptr[u]:self.csr.indptr[u + 1]]

    def scores_of(self, u: int) -> np.ndarray:
        """Scores aligned with rated_items(u)."""
        return self.csr.data[self.csr.indptr[u]:self.csr.indptr[u + 1]]

    def rating_count(self, u: int) -> int:
        return int(self.csr.indptr[u + 1] - self.csr.indptr[u])

    @property
    def n_ratings(self) -> int:
        return int(self.csr.nnz)

    def to_internal_user(self, ext: int) -> int:
        pos = int(np.searchsorted(self.user_ids, ext))
        if pos >= len(self.user_ids) or self.user_ids[pos] != ext:
            raise KeyError(f"unknown external user id {ext}")
        return pos


@dataclass(frozen=True)
class TestSets:
    """Per-user held-out item sets E_u, disjoint from the train ratings."""

    sets: tuple  # tuple of sorted int ndarrays, one per user

    def __getitem__(self, u: int) -> np.ndarray:
        return self.sets[u]

    def __len__(self) -> int:
        return len(self.sets)

    def size(self, u: int) -> int:
        return int(len(self.sets[u]))


def _build_matrix(users, items, scores, domain, user_ids=None, item_ids=None) -> RatingMatrix:
    """Assemble a RatingMatrix from parallel entry arrays, remapping ids.

    When user_ids/item_ids are given they fix the dimensions and the mapping
    (used by splits, which must keep the parent matrix shape).
    """
    users = np.asarray(users, dtype=np.int64)
    items = np.asarray(items, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if user_ids is None:
        user_ids, users = np.unique(users, return_inverse=True)
    if item_ids is None:
        item_ids, items = np.unique(items, return_inverse=True)
    n, m = len(user_ids), len(item_ids)
    key = users * m + items
    if len(np.unique(key)) != len(key):
        raise ParseError("duplicate (user, item) rating")
    mat = csr_matrix((scores, (users, items)), shape=(n, m))
    mat.sort_indices()
    return RatingMatrix(n_users=n, n_items=m, csr=mat, domain=domain,
                        user_ids=np.asarray(user_ids), item_ids=np.asarray(item_ids))


def load_ratings(path: str, format: str) -> RatingMatrix:
    """Parse a rating file into a RatingMatrix.

    Formats: movielens-100k-tab (user<TAB>item<TAB>rating<TAB>timestamp),
    movielens-dat-double-colon (::-separated, same fields), generic-csv
    (headerless user,item,rating). Timestamps are validated and discarded.
    """
    if format not in _SEPARATORS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    sep = _SEPARATORS[format]
    ml = format != "generic-csv"
    users, items, scores = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(sep)
            if len(parts) < 3:
                raise ParseError(f"{path}: line {lineno}: expected at least 3 fields, got {len(parts)}")
            try:
                u = int(parts[0])
                i = int(parts[1])
                score = float(parts[2])
                if len(parts) > 3 and parts[3]:
                    int(parts[3])  # timestamp: validated, then discarded
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
            if ml and not _ML_DOMAIN.accepts(score):
                raise ParseError(f"{path}: line {lineno}: rating {score} outside domain [1..5]")
            if not ml and (score == 0 or not math.isfinite(score)):
                raise ParseError(f"{path}: line {lineno}: rating must be nonzero and finite")
            users.append(u)
            items.append(i)
            scores.append(score)
    if not users:
        raise ParseError(f"{path}: empty rating file")
    if ml:
        domain = _ML_DOMAIN
    else:
        domain = RatingDomain(lo=float(min(scores)), hi=float(max(scores)), integral=False)
    return _build_matrix(users, items, scores, domain)


def split_train_test(matrix: RatingMatrix, train_fraction: float, seed: int):
    """Per-user uniform random split into a train matrix and held-out TestSets.

    Each user keeps floor(train_fraction * count) ratings for training, at
    least 1 so every user has a profile; the remainder becomes E_u. The split
    of one user is independent of all others (per-user seeding).
    """
    if not 0 < train_fraction <= 1:
        raise ValueError(f"train_fraction must be in (0, 1], got {train_fraction}")
    tr_users, tr_items, tr_scores = [], [], []
    test_sets = []
    for u in range(matrix.n_users):
        rated = matrix.rated_items(u)
        scores = matrix.scores_of(u)
        count = len(rated)
        if count == 0:
            raise ValueError(f"user {u} has no ratings; split requires >=1 per user")
        k = int(math.floor(train_fraction * count))
        if k == 0:
            k = 1  # never leave a user without a train profile
        rng = np.random.default_rng([seed, u])
        picked = np.sort(rng.choice(count, size=k, replace=False))
        mask = np.zeros(count, dtype=bool)
        mask[picked] = True
        tr_users.append(np.full(k, u))
        tr_items.append(rated[mask])
        tr_scores.append(scores[mask])
        test_sets.append(np.array(sorted(rated[~mask]), dtype=np.int64))
    train = _build_matrix(
        np.concatenate(tr_users), np.concatenate(tr_items), np.concatenate(tr_scores),
        matrix.domain, user_ids=matrix.user_ids, item_ids=matrix.item_ids)
    return train, TestSets(sets=tuple(test_sets))


def _format_score(x: float) -> str:
    # canonical text form so identical splits serialize byte-identically
    return repr(float(x))


def save_split(path: str, train: RatingMatrix, tests: TestSets, seed: int, fraction: float) -> None:
    """Persist a split: header, then train,u,i,score and test,u,i rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#split v1 n={train.n_users} m={train.n_items} seed={seed} fraction={_format_score(fraction)}\n")
        for u in range(train.n_users):
            items = train.rated_items(u)
            scores = train.scores_of(u)
            for i, sc in zip(items, scores):
                fh.write(f"train,{u},{int(i)},{_format_score(sc)}\n")
        for u in range(len(tests)):
            for i in tests[u]:
                fh.write(f"test,{u},{int(i)}\n")


def _parse_header(line: str, magic: str) -> dict:
    if not line.startswith(magic):
        raise ParseError(f"bad header, expected {magic!r}: {line[:60]!r}")
    fields = {}
    for tok in line[len(magic):].split():
        key, _, val = tok.partition("=")
        fields[key] = val
    return fields


def load_split(path: str):
    """Load a persisted split; returns (train, tests, header dict)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = _parse_header(fh.readline().rstrip("\n"), "#split v1 ")
        try:
            n = header["n"] = int(header["n"])
            m = header["m"] = int(header["m"])
            header["seed"] = int(header["seed"])
            header["fraction"] = float(header["fraction"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"{path}: malformed split header: {exc}") from None
        users, items, scores = [], [], []
        test_lists = [[] for _ in range(n)]
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                if parts[0] == "train" and len(parts) == 4:
                    users.append(int(parts[1])); items.append(int(parts[2])); scores.append(float(parts[3]))
                elif parts[0] == "test" and len(parts) == 3:
                    test_lists[int(parts[1])].append(int(parts[2]))
                else:
                    raise ValueError(f"unrecognized row kind {parts[0]!r}")
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    lo = min(scores) if scores else 1.0
    hi = max(scores) if scores else 5.0
    integral = all(float(s).is_integer() for s in scores)
    domain = RatingDomain(lo=float(lo), hi=float(hi), integral=integral)
    train = _build_matrix(users, items, scores, domain,
                          user_ids=np.arange(n), item_ids=np.arange(m))
    tests = TestSets(sets=tuple(np.array(sorted(t), dtype=np.int64) for t in test_lists))
    return train, tests, header
