"""Certified intersection sizes for the ensemble recommender.

For a user u with target item set I_u (held-out test items or the clean top-N)
and at most e fake users appended to the rating matrix, the certified
intersection size r is the largest r' in [1, min(|I_u|, N)] satisfying

    floor*(mu_r') > min( min_{c=1..N-r'+1} N' * (ceil*(HC_c / N') + sigma) / c,
                         ceil*(v1) + sigma )

where mu_r' is the r'-th largest item-probability lower bound inside I_u, the
competitors are the N-r'+1 largest upper bounds outside I_u (v1 the smallest
of those, HC_c the sum of the c smallest of those, capped by N' minus the sum
of all lower bounds), sigma is the attack slack from the combinatoric context,
and floor*/ceil* are the C(n,s)-grid roundings. The left side falls and the
right side rises in r', so binary search applies; r = 0 when even r' = 1 fails.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .bounds import (CombinatoricContext, ProbBounds, estimate_bounds,
                     make_context, round_lower_star, round_upper_star)

log = logging.getLogger(__name__)

_Z_CAP_FACTOR = 10  # bagging Z search stops at 10*n fake users; sigma has
                    # grown past any probability gap long before that


@dataclass(frozen=True)
class CertQuery:
    """One certification question: user, target set, attack budget, context."""

    user: int
    items: tuple                 # I_u, nonempty
    e: int
    N: int
    n_prime: int
    s: int
    bounds: ProbBounds
    ctx: CombinatoricContext

    def __post_init__(self):
        if not self.items:
            raise ValueError("I_u must be nonempty")
        if self.N < 1 or self.n_prime < 1 or self.e < 0:
            raise ValueError("need N >= 1, N' >= 1, e >= 0")


@dataclass(frozen=True)
class CertResult:
    user: int
    e: int
    r: int
    alpha: float  # per-user error budget the bounds were estimated at
    mode: str     # "exact" or "approx"


def verify_constraint(r_prime: int, q: CertQuery) -> bool:
    """Evaluate the certification constraint at candidate intersection size r_prime."""
    k = min(len(q.items), q.N)
    if not 1 <= r_prime <= k:
        raise ValueError(f"r_prime must be in [1, {k}], got {r_prime}")
    sigma = q.ctx.sigma
    if isinstance(sigma, float) and math.isinf(sigma):
        return False  # coefficient ratio overflowed: no guarantee at this e
    b = q.bounds
    lhs = round_lower_star(b.mu_desc[r_prime - 1], q.ctx)
    window = q.N - r_prime + 1
    avail = min(window, b.n_outside)
    if avail == 0:
        # no items outside I_u at all: nothing can displace the target set
        return True
    # competitors: the `avail` largest outside upper bounds; within them,
    # v1 is the smallest and HC_c sums the c smallest
    v1_star = round_upper_star(b.out_upper_desc[avail - 1], q.ctx)
    rhs = v1_star + sigma
    cap = q.n_prime - b.sum_lower
    if cap < 0:
        log.warning("user %d: vote-share cap below zero (%s); bounds are "
                    "inconsistent, clamping", q.user, cap)
        cap = 0
    for c in range(1, avail + 1):
        hc = b.out_prefix[avail] - b.out_prefix[avail - c]
        if cap < hc:
            hc = cap
        hc_star = round_upper_star(hc / q.n_prime, q.ctx)
        term = q.n_prime * (hc_star + sigma) / c
        if term < rhs:
            rhs = term
    return lhs > rhs


def binary_search_r(q: CertQuery) -> CertResult:
    """Largest r' with the constraint satisfied, or 0 if none is."""
    lo, hi = 1, min(len(q.items), q.N)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if verify_constraint(mid, q):
            lo = mid
        else:
            hi = mid - 1
    # the loop converges to the only remaining candidate; it still needs one
    # check because nothing so far proves the constraint holds anywhere
    r = lo if verify_constraint(lo, q) else 0
    mode = "exact" if q.ctx.exact_mode else "approx"
    return CertResult(user=q.user, e=q.e, r=r, alpha=q.bounds.alpha_u, mode=mode)


def exact_bounds_from_probs(user: int, items_in, probs, m: int) -> ProbBounds:
    """ProbBounds built from exact item probabilities (both sides tight).

    probs maps item id -> exact probability (Fraction). alpha_u is recorded
    as 0: there is no estimation error to budget for.
    """
    items_in = tuple(sorted(int(i) for i in items_in))
    in_set = set(items_in)
    lower = {i: Fraction(probs[i]) for i in items_in}
    upper = {j: Fraction(probs[j]) for j in range(m) if j not in in_set}
    return ProbBounds(user=user, items_in=items_in, lower=lower, upper=upper,
                      alpha_u=0.0, m=m)


def _exactify(b: ProbBounds) -> ProbBounds:
    """Rebuild float bounds as exact rationals for exact-mode arithmetic."""
    return ProbBounds(user=b.user, items_in=b.items_in,
                      lower={i: Fraction(v) for i, v in b.lower.items()},
                      upper={j: Fraction(v) for j, v in b.upper.items()},
                      alpha_u=b.alpha_u, m=b.m)


@dataclass(frozen=True)
class SweepResult:
    """Certification results per attack budget, plus the users skipped."""

    per_e: dict           # e -> list[CertResult], user-ascending
    skipped: tuple        # users with empty I_u


def certify_sweep(train, counts, target_sets, alpha: float, e_list, N: int,
                  n_prime: int, s: int, mode: str = "approx",
                  convention: str = "lower_shapes") -> SweepResult:
    """Certify every user at every e in e_list, estimating bounds only once.

    target_sets maps user -> I_u (anything iterable of item ids). Bounds are
    estimated at the per-user budget alpha / n and shared across the e sweep;
    only sigma changes with e.
    """
    _check_counts(counts, train, s, n_prime)
    if mode not in ("exact", "approx"):
        raise ValueError(f"mode must be 'exact' or 'approx', got {mode!r}")
    exact = mode == "exact"
    n = train.n_users
    alpha_u = alpha / n
    e_list = sorted(set(int(e) for e in e_list))
    contexts = {e: make_context(n, e, s, exact) for e in e_list}
    per_e = {e: [] for e in e_list}
    skipped = []
    for u in range(n):
        items = tuple(int(i) for i in target_sets[u])
        if not items:
            skipped.append(u)
            continue
        b = estimate_bounds(counts, u, items, alpha_u, convention)
        if exact:
            b = _exactify(b)
        for e in e_list:
            q = CertQuery(user=u, items=items, e=e, N=N, n_prime=n_prime,
                          s=s, bounds=b, ctx=contexts[e])
            per_e[e].append(binary_search_r(q))
    if skipped:
        log.info("skipped %d users with empty target sets: %s",
                 len(skipped), skipped[:20])
    return SweepResult(per_e=per_e, skipped=tuple(skipped))


def compute_all_r(train, counts, target_sets, alpha: float, e: int, N: int,
                  n_prime: int, s: int, mode: str = "approx",
                  convention: str = "lower_shapes") -> list[CertResult]:
    """Certified r for every user with a nonempty target set, at one e."""
    sweep = certify_sweep(train, counts, target_sets, alpha, [e], N, n_prime,
                          s, mode, convention)
    return sweep.per_e[e]


def _check_counts(counts, train, s: int, n_prime: int) -> None:
    if counts.s != s or counts.n_prime != n_prime:
        raise ValueError(
            f"vote counts were built with s={counts.s}, N'={counts.n_prime}; "
            f"certification asked for s={s}, N'={n_prime}")
    if counts.n != train.n_users or counts.m != train.n_items:
        raise ValueError("vote counts shape does not match the training matrix")


# ---------------------------------------------------------------------------
# single-competitor baseline (votes built with N' = 1)

def _largest_surviving_e(survives, cap: int) -> int:
    """Largest e' in [0, cap] with survives(e') true, else -1 (monotone in e')."""
    if not survives(0):
        return -1
    lo, hi = 0, 1
    while hi <= cap and survives(hi):
        lo, hi = hi, hi * 2
    if hi > cap:
        if survives(cap):
            return cap
        hi = cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if survives(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _bagging_z_values(b: ProbBounds, n: int, s: int, exact: bool) -> list[int]:
    """Z_i per target item: how many fake users item i's lead provably survives.

    Item i beats the single strongest outside competitor while
    floor*(lower_i) > ceil*(upper_max) + sigma(e'); Z_i is the largest such e'.
    """
    ctx0 = make_context(n, 0, s, exact)
    cap = _Z_CAP_FACTOR * n
    if b.n_outside == 0:
        return [cap for _ in b.items_in]  # no competitor to lose to
    pbar_star = round_upper_star(b.out_upper_desc[0], ctx0)
    zs = []
    for i in b.items_in:
        lhs = round_lower_star(b.lower[i], ctx0)

        def survives(e_prime: int) -> bool:
            sigma = make_context(n, e_prime, s, exact).sigma
            if isinstance(sigma, float) and math.isinf(sigma):
                return False
            return lhs > pbar_star + sigma

        zs.append(_largest_surviving_e(survives, cap))
    return zs


def bagging_baseline_r(q: CertQuery) -> CertResult:
    """Baseline certified size: per-item single-competitor survival counts.

    r = min(#{i in I_u : Z_i >= e}, N). Requires vote counts built with
    N' = 1 (each base model casts one vote, majority-vote semantics).
    """
    if q.n_prime != 1:
        raise ValueError("the baseline is defined for N' = 1 vote counts")
    zs = _bagging_z_values(q.bounds, q.ctx.n, q.s, q.ctx.exact_mode)
    r = min(sum(1 for z in zs if z >= q.e), q.N)
    mode = "exact" if q.ctx.exact_mode else "approx"
    return CertResult(user=q.user, e=q.e, r=r, alpha=q.bounds.alpha_u, mode=mode)


def bagging_sweep(train, counts, target_sets, alpha: float, e_list, N: int,
                  s: int, mode: str = "approx",
                  convention: str = "lower_shapes") -> SweepResult:
    """Baseline certification over an e sweep; Z values computed once per user."""
    _check_counts(counts, train, s, 1)
    exact = mode == "exact"
    n = train.n_users
    alpha_u = alpha / n
    e_list = sorted(set(int(e) for e in e_list))
    per_e = {e: [] for e in e_list}
    skipped = []
    mode_name = "exact" if exact else "approx"
    for u in range(n):
        items = tuple(int(i) for i in target_sets[u])
        if not items:
            skipped.append(u)
            continue
        b = estimate_bounds(counts, u, items, alpha_u, convention)
        if exact:
            b = _exactify(b)
        zs = _bagging_z_values(b, n, s, exact)
        for e in e_list:
            r = min(sum(1 for z in zs if z >= e), N)
            per_e[e].append(CertResult(user=u, e=e, r=r, alpha=alpha_u,
                                       mode=mode_name))
    return SweepResult(per_e=per_e, skipped=tuple(skipped))
