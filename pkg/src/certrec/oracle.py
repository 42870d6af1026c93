"""Exact ground truth on tiny instances, and concrete attacks that try to
falsify certified guarantees.

Enumerating all C(n,s) submatrices gives exact item probabilities, the
reference against which sampled vote counts are validated. Appending real
fake-user rows and recomputing the exact poisoned ensemble can then only
falsify a certificate, never prove one: any observed intersection below the
certified r is a build-failing bug.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix, vstack

from .base_rec import recommend, train_base
from .ratings import RatingMatrix

MAX_ENUM = 10 ** 6  # refuse instances with more than this many subsets

ATTACKS = ("random-ratings", "copy-popular", "all-max-on-random-items")


@dataclass(frozen=True)
class ExactProbs:
    """Exact per-user, per-item recommendation probabilities."""

    n_subsets: int        # C(n, s)
    hits: np.ndarray      # n x m; hits[u][i] = subsets whose model recommends i to u

    def prob(self, u: int, i: int) -> Fraction:
        return Fraction(int(self.hits[u, i]), self.n_subsets)

    def prob_row(self, u: int) -> list:
        return [Fraction(int(h), self.n_subsets) for h in self.hits[u]]


def exact_item_probs(matrix: RatingMatrix, algo: str, params, s: int,
                     n_prime: int) -> ExactProbs:
    """Enumerate every s-subset of users (lexicographic) and count votes."""
    n, m = matrix.n_users, matrix.n_items
    total = math.comb(n, s)
    if total > MAX_ENUM:
        raise ValueError(f"C({n},{s}) = {total} exceeds the enumeration guard {MAX_ENUM}")
    hits = np.zeros((n, m), dtype=np.int64)
    for subset in itertools.combinations(range(n), s):
        model = train_base(algo, matrix, np.asarray(subset), params)
        for u in subset:
            for i in recommend(model, u, n_prime):
                hits[u, i] += 1
    return ExactProbs(n_subsets=total, hits=hits)


def top_n_from_hits(probs: ExactProbs, matrix: RatingMatrix, user: int,
                    N: int) -> list[int]:
    """Ensemble top-N from exact probabilities; same tie-break rules as sampling."""
    row = probs.hits[user]
    mask = np.ones(len(row), dtype=bool)
    mask[matrix.rated_items(user)] = False
    candidates = np.flatnonzero(mask)
    order = np.lexsort((candidates, -row[candidates]))
    return [int(i) for i in candidates[order[:N]]]


def append_fake_users(matrix: RatingMatrix, fake_rows: np.ndarray) -> RatingMatrix:
    """New matrix with the fake rating rows appended after the genuine users."""
    fake = csr_matrix(np.asarray(fake_rows, dtype=np.float64))
    if fake.shape[1] != matrix.n_items:
        raise ValueError("fake rows must cover exactly the m existing items")
    stacked = vstack([matrix.csr, fake]).tocsr()
    stacked.sort_indices()
    n_new = stacked.shape[0]
    # fake users have no external identity; -1 marks them in the id table
    ext = np.concatenate([matrix.user_ids, np.full(n_new - matrix.n_users, -1)])
    return RatingMatrix(n_users=n_new, n_items=matrix.n_items, csr=stacked,
                        domain=matrix.domain, user_ids=ext,
                        item_ids=matrix.item_ids)


def _domain_scores(matrix: RatingMatrix, rng: np.random.Generator, size: int) -> np.ndarray:
    dom = matrix.domain
    if dom.integral:
        return rng.integers(int(dom.lo), int(dom.hi) + 1, size=size).astype(float)
    return rng.uniform(dom.lo, dom.hi, size=size)


def make_fake_rows(matrix: RatingMatrix, e: int, attack: str,
                   rng: np.random.Generator) -> np.ndarray:
    """e fake rating rows under the named strategy; all scores in the domain."""
    m = matrix.n_items
    rows = np.zeros((e, m))
    if attack == "random-ratings":
        # each item rated with prob 1/2, score drawn from the rating domain
        for f in range(e):
            picked = rng.random(m) < 0.5
            rows[f, picked] = _domain_scores(matrix, rng, int(picked.sum()))
    elif attack == "copy-popular":
        # everyone pushes the already-popular items at the top score
        pop = np.asarray(matrix.csr.getnnz(axis=0))
        width = max(1, math.ceil(matrix.n_ratings / matrix.n_users))
        order = np.lexsort((np.arange(m), -pop))
        rows[:, order[:width]] = matrix.domain.hi
    elif attack == "all-max-on-random-items":
        for f in range(e):
            count = int(rng.integers(1, m + 1))
            items = rng.choice(m, size=count, replace=False)
            rows[f, items] = matrix.domain.hi
    else:
        raise ValueError(f"unknown attack {attack!r}; expected one of {ATTACKS}")
    return rows


@dataclass(frozen=True)
class ViolationReport:
    """Outcome of attack trials against certified sizes."""

    trials: int
    violations: tuple     # (trial index, user, observed intersection, certified r)
    min_intersection: dict  # user -> smallest |I_u ∩ poisoned top-N| seen

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_one_poisoning(matrix, poisoned, algo, params, s, n_prime, N,
                         targets, cert_r, trial, violations, min_inter):
    probs = exact_item_probs(poisoned, algo, params, s, n_prime)
    for u, r_u in cert_r.items():
        topn = top_n_from_hits(probs, matrix, u, N)
        inter = len(set(targets[u]) & set(topn))
        if u not in min_inter or inter < min_inter[u]:
            min_inter[u] = inter
        if inter < r_u:
            violations.append((trial, u, inter, r_u))


def attack_soundness_check(matrix: RatingMatrix, algo: str, params, s: int,
                           n_prime: int, N: int, e: int, attack: str,
                           trials: int, seed: int, cert_results,
                           targets) -> ViolationReport:
    """Run concrete poisoning attacks and compare against certified sizes.

    cert_results: per-user CertResult (or any object with .user and .r);
    targets: user -> I_u the certificates were computed for. Each trial
    appends e fake rows, recomputes the exact poisoned ensemble by full
    enumeration over C(n+e, s) subsets, and records any user whose observed
    intersection drops below the certified r.
    """
    if math.comb(matrix.n_users + e, s) > MAX_ENUM:
        raise ValueError("poisoned instance exceeds the enumeration guard")
    cert_r = {res.user: res.r for res in cert_results}
    rng = np.random.default_rng(seed)
    violations, min_inter = [], {}
    if e == 0:
        _check_one_poisoning(matrix, matrix, algo, params, s, n_prime, N,
                             targets, cert_r, 0, violations, min_inter)
        return ViolationReport(trials=1, violations=tuple(violations),
                               min_intersection=min_inter)
    for trial in range(trials):
        rows = make_fake_rows(matrix, e, attack, rng)
        poisoned = append_fake_users(matrix, rows)
        _check_one_poisoning(matrix, poisoned, algo, params, s, n_prime, N,
                             targets, cert_r, trial, violations, min_inter)
    return ViolationReport(trials=trials, violations=tuple(violations),
                           min_intersection=min_inter)


def exhaustive_two_level_check(matrix: RatingMatrix, algo: str, params, s: int,
                               n_prime: int, N: int, cert_results,
                               targets) -> ViolationReport:
    """Every possible single fake user over a two-level rating alphabet.

    The adversary's row takes values in {0, top score} per item; all 2^m
    patterns (including the empty row) are tried. Exhaustive over this
    discretized domain, so a surviving certificate was genuinely never beaten
    by any such attacker.
    """
    m = matrix.n_items
    if math.comb(matrix.n_users + 1, s) > MAX_ENUM or m > 20:
        raise ValueError("exhaustive adversary is desk-scale only")
    cert_r = {res.user: res.r for res in cert_results}
    violations, min_inter = [], {}
    hi = matrix.domain.hi
    for pattern in range(2 ** m):
        row = np.zeros((1, m))
        for i in range(m):
            if pattern >> i & 1:
                row[0, i] = hi
        poisoned = append_fake_users(matrix, row)
        _check_one_poisoning(matrix, poisoned, algo, params, s, n_prime, N,
                             targets, cert_r, pattern, violations, min_inter)
    return ViolationReport(trials=2 ** m, violations=tuple(violations),
                           min_intersection=min_inter)
