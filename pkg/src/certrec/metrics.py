"""Standard and certified Precision/Recall/F1 at N.

Certified metrics are worst-case floors implied by a certified intersection
size r against the held-out set E_u: precision >= r/N, recall >= r/|E_u|,
F1 >= 2r/(|E_u|+N). The F1 floor is computed directly from that formula (it
equals the harmonic mean of the unrounded precision and recall floors).
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class MetricRow:
    """Average metrics at one attack budget e."""

    e: int
    cert_precision: float
    cert_recall: float
    cert_f1: float
    std_precision: float | None = None  # e=0 counterparts, when computed
    std_recall: float | None = None
    std_f1: float | None = None
    n_users: int = 0


def certified_metrics(r: int, N: int, test_size: int):
    """Per-user certified (precision, recall, f1) floors from r."""
    if test_size <= 0:
        raise ValueError("test_size must be positive; exclude the user instead")
    if not 0 <= r <= min(N, test_size):
        raise ValueError(f"need 0 <= r <= min(N, |E_u|), got r={r}")
    return r / N, r / test_size, 2.0 * r / (test_size + N)


def standard_metrics(recommended, test_set, N: int):
    """Per-user observed (precision, recall, f1) of a recommendation list."""
    if len(recommended) != N:
        raise ValueError(f"expected exactly N={N} recommendations, got {len(recommended)}")
    test = set(int(i) for i in test_set)
    if not test:
        raise ValueError("empty test set; exclude the user instead")
    hit = sum(1 for i in recommended if int(i) in test)
    return hit / N, hit / len(test), 2.0 * hit / (len(test) + N)


def average_over_users(e: int, cert_triples, std_triples=None) -> MetricRow:
    """Unweighted arithmetic mean over the eligible users.

    cert_triples (and std_triples, when given) hold one (p, r, f1) per user
    with a nonempty test set; users with empty sets never reach this point.
    """
    cert = list(cert_triples)
    if not cert:
        raise ValueError("no eligible users to average over")
    k = len(cert)
    cp = sum(t[0] for t in cert) / k
    cr = sum(t[1] for t in cert) / k
    cf = sum(t[2] for t in cert) / k
    row = {"e": int(e), "cert_precision": cp, "cert_recall": cr, "cert_f1": cf,
           "n_users": k}
    if std_triples is not None:
        std = list(std_triples)
        if len(std) != k:
            raise ValueError("standard metrics cover a different user set")
        row["std_precision"] = sum(t[0] for t in std) / k
        row["std_recall"] = sum(t[1] for t in std) / k
        row["std_f1"] = sum(t[2] for t in std) / k
    return MetricRow(**row)


_CSV_COLUMNS = ("e", "cert_precision", "cert_recall", "cert_f1", "n_users")


def write_metric_csv(path: str, rows, extra_columns=()) -> None:
    """Aggregate CSV, one row per e; column order is part of the contract."""
    cols = _CSV_COLUMNS + tuple(extra_columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            d = row if isinstance(row, dict) else asdict(row)
            w.writerow([d[c] for c in cols])


def write_metric_json(path: str, rows) -> None:
    """JSON mirror of the aggregate CSV for plotting tools."""
    payload = [row if isinstance(row, dict) else asdict(row) for row in rows]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
