"""Binomial confidence bounds on item probabilities and binomial-coefficient arithmetic.

Item frequencies T_i out of T base recommenders are binomial in the true item
probability p_i, so one-sided Clopper-Pearson bounds apply: Beta quantiles at a
per-item budget obtained by Bonferroni division of the per-user budget across
the m items. Certification additionally needs C(n,s)-grid roundings of the
bounds and the attack slack

    sigma = (s/n') * C(n',s)/C(n,s) - s/n,   n' = n + e,

available both in exact big-rational arithmetic (tiny instances, oracle tests)
and in log-space doubles (real datasets, where C(n,s) has hundreds of digits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "beta_quantile", "cp_lower", "cp_upper", "estimate_bounds",
    "make_context", "round_lower_star", "round_upper_star",
    "CombinatoricContext", "ProbBounds", "UPPER_CONVENTIONS",
]

UPPER_CONVENTIONS = ("lower_shapes", "textbook")

_QUANTILE_TOL = 1e-12  # bisection width target; iteration continues to ULP level
_CF_EPS = 3e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz iteration)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for mm in range(1, _CF_MAX_ITER + 1):
        m = float(mm)
        m2 = 2.0 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return h  # converged to working precision in practice long before this


def incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0, x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    front = math.exp(ln_front)
    # the continued fraction converges fast only on one side of the mean;
    # use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def beta_quantile(beta: float, a: float, b: float) -> float:
    """x with I_x(a, b) = beta, by bisection on the monotone CDF.

    Bisects below the 1e-12 width target all the way to the floating-point
    grid so the CDF residual stays small even where the density is steep.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # interval is one ULP wide
        if incomplete_beta(a, b, mid) < beta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=65536)
def _quantile_cached(beta: float, a: float, b: float) -> float:
    # vote-count spectra repeat heavily across users; cache pays for itself
    return beta_quantile(beta, a, b)


def cp_lower(t_i: int, t: int, beta: float) -> float:
    """One-sided lower confidence bound on p from t_i successes in t trials."""
    if not 0 <= t_i <= t:
        raise ValueError(f"need 0 <= t_i <= t, got t_i={t_i}, t={t}")
    if t_i == 0:
        return 0.0
    return _quantile_cached(beta, float(t_i), float(t - t_i + 1))


def cp_upper(t_j: int, t: int, beta_level: float, convention: str = "lower_shapes") -> float:
    """One-sided upper confidence bound on p from t_j successes in t trials.

    convention "lower_shapes" evaluates Beta(1-beta_level; t_j, t-t_j+1),
    the same shape pair as the lower bound; "textbook" uses (t_j+1, t-t_j).
    Both agree at t_j=0, where the bound is 1 - beta_level**(1/t) exactly.
    """
    if not 0 <= t_j <= t:
        raise ValueError(f"need 0 <= t_j <= t, got t_j={t_j}, t={t}")
    if convention not in UPPER_CONVENTIONS:
        raise ValueError(f"unknown upper convention {convention!r}")
    if t_j == t:
        return 1.0
    if t_j == 0:
        # Beta(1-beta; 1, t) has the closed form 1 - beta**(1/t); shape 0 is
        # degenerate under lower_shapes, so both conventions use this value
        return 1.0 - beta_level ** (1.0 / t)
    if convention == "lower_shapes":
        return _quantile_cached(1.0 - beta_level, float(t_j), float(t - t_j + 1))
    return _quantile_cached(1.0 - beta_level, float(t_j + 1), float(t - t_j))


@dataclass(frozen=True)
class ProbBounds:
    """Per-user probability bounds: lower on I_u members, upper elsewhere.

    Derived orderings used by certification are computed once at construction:
    mu_desc (lower bounds, descending), sum_lower, and the outside upper
    bounds sorted descending with prefix sums (ties at equal bounds ordered by
    ascending item id so competitor selection is deterministic).
    """

    user: int
    items_in: tuple          # I_u, ascending item ids
    lower: dict              # item id -> lower bound, keys == items_in
    upper: dict              # item id -> upper bound, keys == complement of I_u
    alpha_u: float           # simultaneous per-user error budget
    m: int
    mu_desc: tuple = field(init=False)
    sum_lower: object = field(init=False)
    out_ids_desc: tuple = field(init=False)
    out_upper_desc: tuple = field(init=False)
    out_prefix: tuple = field(init=False)  # out_prefix[k] = sum of k largest uppers

    def __post_init__(self):
        mu = tuple(sorted(self.lower.values(), reverse=True))
        ordered = sorted(self.upper.items(), key=lambda kv: (-kv[1], kv[0]))
        prefix = [0]
        for _, val in ordered:
            prefix.append(prefix[-1] + val)
        object.__setattr__(self, "mu_desc", mu)
        object.__setattr__(self, "sum_lower", sum(self.lower.values()))
        object.__setattr__(self, "out_ids_desc", tuple(k for k, _ in ordered))
        object.__setattr__(self, "out_upper_desc", tuple(v for _, v in ordered))
        object.__setattr__(self, "out_prefix", tuple(prefix))

    @property
    def n_outside(self) -> int:
        return len(self.out_upper_desc)


def estimate_bounds(counts, user: int, items_in, alpha_u: float,
                    convention: str = "lower_shapes") -> ProbBounds:
    """Simultaneous bounds for one user from vote counts.

    Bonferroni: each of the m per-item bounds gets budget alpha_u / m, so all
    hold together with probability >= 1 - alpha_u.
    """
    if not 0.0 < alpha_u < 1.0:
        raise ValueError(f"alpha_u must be in (0, 1), got {alpha_u}")
    items_in = tuple(sorted(int(i) for i in items_in))
    if not items_in:
        raise ValueError("items_in must be nonempty")
    if len(set(items_in)) != len(items_in):
        raise ValueError("items_in contains duplicate item ids")
    t = counts.T
    m = counts.m
    if items_in[0] < 0 or items_in[-1] >= m:
        raise ValueError(f"items_in ids must lie in [0, {m})")
    row = counts.counts[user]
    budget = alpha_u / m
    in_set = set(items_in)
    lower = {i: cp_lower(int(row[i]), t, budget) for i in items_in}
    upper = {j: cp_upper(int(row[j]), t, budget, convention)
             for j in range(m) if j not in in_set}
    return ProbBounds(user=user, items_in=items_in, lower=lower, upper=upper,
                      alpha_u=alpha_u, m=m)


@dataclass(frozen=True)
class CombinatoricContext:
    """C(n,s)/C(n',s) arithmetic for one (n, e, s) triple.

    exact_mode keeps big integers and exact rational sigma; approximate mode
    keeps log-space doubles with a one-sided upward guard on sigma so rounding
    error can only make certification more conservative. sigma = +inf encodes
    overflow of the coefficient ratio (any comparison against it then fails).
    """

    n: int
    e: int
    s: int
    exact_mode: bool
    log_ratio: float         # ln(C(n',s) / C(n,s))
    sigma: object            # float (approx) or Fraction (exact); may be +inf
    c_ns: int | None         # C(n, s), exact mode only
    c_nps: int | None        # C(n', s), exact mode only

    @property
    def n_prime_users(self) -> int:
        return self.n + self.e


@lru_cache(maxsize=4096)
def make_context(n: int, e: int, s: int, exact_mode: bool = False) -> CombinatoricContext:
    """Build the coefficient context for n genuine users, e fake users, s rows."""
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    if e < 0:
        raise ValueError(f"e must be >= 0, got {e}")
    np_users = n + e
    # C(n',s)/C(n,s) = prod_{j<s} (1 + e/(n-j)); summed in log space
    log_ratio = math.fsum(math.log1p(e / (n - j)) for j in range(s))
    if exact_mode:
        c_ns = math.comb(n, s)
        c_nps = math.comb(np_users, s)
        sigma = Fraction(s, np_users) * Fraction(c_nps, c_ns) - Fraction(s, n)
        return CombinatoricContext(n=n, e=e, s=s, exact_mode=True,
                                   log_ratio=log_ratio, sigma=sigma,
                                   c_ns=c_ns, c_nps=c_nps)
    # sigma = (s/n') * ratio - s/n = (s/n) * (exp(log_ratio + ln(n/n')) - 1);
    # expm1 keeps full relative precision through the near-cancellation at
    # small e, where the two terms agree to several digits
    try:
        sigma = (s / n) * math.expm1(log_ratio + math.log1p(-e / np_users))
    except OverflowError:
        sigma = math.inf
    if math.isfinite(sigma) and sigma > 0:
        sigma *= 1.0 + 1e-13  # upward guard: never understate the attack slack
    return CombinatoricContext(n=n, e=e, s=s, exact_mode=False,
                               log_ratio=log_ratio, sigma=sigma,
                               c_ns=None, c_nps=None)


def round_lower_star(p, ctx: CombinatoricContext):
    """floor(p * C(n,s)) / C(n,s) in exact mode; identity in approximate mode.

    Approximate mode skips the rounding: its one-sided error is below
    1/C(n,s), which for every configuration this mode is used with lies far
    under double-precision resolution (C(943,200) has over 200 digits).
    """
    if ctx.exact_mode:
        return Fraction(math.floor(Fraction(p) * ctx.c_ns), ctx.c_ns)
    return p


def round_upper_star(p, ctx: CombinatoricContext):
    """ceil(p * C(n,s)) / C(n,s) in exact mode; identity in approximate mode."""
    if ctx.exact_mode:
        return Fraction(math.ceil(Fraction(p) * ctx.c_ns), ctx.c_ns)
    return p
