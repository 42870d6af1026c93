"""Provably robust ensemble recommenders with certified top-N metrics.

The pipeline: partition ratings into train/test, train T base recommenders on
random s-user submatrices, aggregate their top-N' outputs into per-item vote
counts, bound each item's selection probability with simultaneous
Clopper-Pearson intervals, and certify the number of target items that must
remain in the ensemble top-N under any poisoning attack that adds at most e
fake users. Certified intersection sizes translate directly into certified
Precision/Recall/F1 floors.
"""

from .base_rec import BPRParams, IRParams, recommend, train_base
from .bounds import (cp_lower, cp_upper, estimate_bounds, incomplete_beta,
                     make_context)
from .certify import (CertQuery, CertResult, bagging_sweep, binary_search_r,
                      certify_sweep, compute_all_r, verify_constraint)
from .ensemble import (VoteCounts, build_vote_counts, derive_seed,
                       ensemble_recommend, load_votes, save_votes)
from .metrics import certified_metrics, standard_metrics
from .ratings import (RatingMatrix, TestSets, load_ratings, load_split,
                      save_split, split_train_test)

__version__ = "0.1.0"

__all__ = [
    "BPRParams", "IRParams", "recommend", "train_base",
    "cp_lower", "cp_upper", "estimate_bounds", "incomplete_beta", "make_context",
    "CertQuery", "CertResult", "bagging_sweep", "binary_search_r",
    "certify_sweep", "compute_all_r", "verify_constraint",
    "VoteCounts", "build_vote_counts", "derive_seed", "ensemble_recommend",
    "load_votes", "save_votes",
    "certified_metrics", "standard_metrics",
    "RatingMatrix", "TestSets", "load_ratings", "load_split", "save_split",
    "split_train_test",
    "__version__",
]
