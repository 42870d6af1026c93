"""Command-line surface: ingest, train, recommend, certify, evaluate, baseline, oracle.

Every command that writes results also writes a JSON manifest carrying the
exact parameters and seeds, so a run can be reproduced from its outputs.
Configuration comes from defaults, then an optional key=value config file,
then explicit command-line flags (flags win).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import base_rec, certify, ensemble, metrics, oracle, ratings

# defaults mirror the reference evaluation setup; T is shipped smaller than
# the reference 100000 because certified values only grow with T (the shipped
# default is conservative) and desk hardware matters
DEFAULTS = {
    "format": "movielens-100k-tab",
    "fraction": 0.75,
    "seed": 0,
    "algo": "ir",
    "s": 200,
    "T": 10000,
    "nprime": 1,
    "N": 10,
    "alpha": 0.001,
    "e": "0:30",
    "mode": "approx",
    "threads": None,        # resolved via --threads, then PORE_THREADS, then 1
    "chunk_size": 200,
    "ir.k": 50,
    "bpr.d": 16,
    "bpr.epochs": 30,
    "bpr.learn_rate": 0.05,
    "bpr.reg": 0.01,
    "bpr.neg_samples": 1,
    "bounds.upper_convention": "lower_shapes",
}

_INT_KEYS = {"seed", "s", "T", "nprime", "N", "threads", "chunk_size",
             "ir.k", "bpr.d", "bpr.epochs", "bpr.neg_samples"}
_FLOAT_KEYS = {"fraction", "alpha", "bpr.learn_rate", "bpr.reg"}


@dataclass
class RunConfig:
    """Resolved settings for one command invocation."""

    values: dict = field(default_factory=lambda: dict(DEFAULTS))

    def __getitem__(self, key):
        return self.values[key]

    def update(self, other: dict) -> None:
        for key, val in other.items():
            if val is not None:
                self.values[key] = val

    def ir_params(self) -> base_rec.IRParams:
        return base_rec.IRParams(k=int(self.values["ir.k"]))

    def bpr_params(self) -> base_rec.BPRParams:
        v = self.values
        return base_rec.BPRParams(d=int(v["bpr.d"]), epochs=int(v["bpr.epochs"]),
                                  learn_rate=float(v["bpr.learn_rate"]),
                                  reg=float(v["bpr.reg"]),
                                  neg_samples=int(v["bpr.neg_samples"]))

    def algo_params(self, algo: str):
        return self.ir_params() if algo == "ir" else self.bpr_params()

    def threads(self) -> int:
        t = self.values.get("threads")
        if t is None:
            t = os.environ.get("PORE_THREADS", "1")
        t = int(t)
        return max(1, t)


def parse_config_file(path: str) -> dict:
    """key=value lines; blank lines and # comments ignored; typed per key."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected key=value")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in DEFAULTS:
                raise ValueError(f"{path}: line {lineno}: unknown key {key!r}")
            out[key] = _coerce(key, val)
    return out


def _coerce(key: str, val: str):
    if key in _INT_KEYS:
        return int(val)
    if key in _FLOAT_KEYS:
        return float(val)
    return val


def parse_e_list(text: str) -> list[int]:
    """'0:30' is an inclusive range; comma-separated entries may mix ranges."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, _, hi = part.partition(":")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        return []
    return sorted(set(out))


def _write_manifest(path: str, command: str, params: dict, started: float) -> None:
    payload = {
        "command": command,
        "params": {k: params[k] for k in sorted(params)},
        "wall_time_s": round(time.time() - started, 3),
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve(args, keys) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg.update(parse_config_file(args.config))
    cfg.update({k: getattr(args, k.replace(".", "_"), None) for k in keys})
    return cfg


# ---------------------------------------------------------------------------
# commands

def cmd_ingest(args) -> int:
    cfg = _resolve(args, ("format", "fraction", "seed"))
    started = time.time()
    matrix = ratings.load_ratings(args.data, cfg["format"])
    train, tests = ratings.split_train_test(matrix, float(cfg["fraction"]),
                                            int(cfg["seed"]))
    ratings.save_split(args.out, train, tests, int(cfg["seed"]),
                       float(cfg["fraction"]))
    with open(args.out + ".ids.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "internal", "external"])
        for pos, ext in enumerate(matrix.user_ids):
            w.writerow(["user", pos, int(ext)])
        for pos, ext in enumerate(matrix.item_ids):
            w.writerow(["item", pos, int(ext)])
    mean_train = train.n_ratings / train.n_users
    _write_manifest(args.out + ".manifest.json", "ingest",
                    {"data": args.data, "format": cfg["format"],
                     "fraction": cfg["fraction"], "seed": cfg["seed"],
                     "n": train.n_users, "m": train.n_items}, started)
    print(f"ingested {matrix.n_users} users x {matrix.n_items} items, "
          f"{matrix.n_ratings} ratings; train keeps {train.n_ratings} "
          f"({mean_train:.1f}/user), held out {sum(tests.size(u) for u in range(len(tests)))}")
    return 0


def _train_chunked(train, cfg, algo, T, s, nprime, seed, out, threads,
                   chunk_size, resume, max_chunks):
    """Accumulate votes chunk by chunk with a resumable partial on disk."""
    progress_path = out + ".progress.json"
    partial_path = out + ".partial"
    done = 0
    counts = np.zeros((train.n_users, train.n_items), dtype=np.int32)
    if resume and os.path.exists(progress_path):
        with open(progress_path, "r", encoding="utf-8") as fh:
            progress = json.load(fh)
        expect = {"algo": algo, "T": T, "s": s, "nprime": nprime, "seed": seed}
        if progress["params"] != expect:
            raise ValueError("existing partial run used different parameters; "
                             "remove it or change --out")
        done = int(progress["completed_t"])
        counts = ensemble.load_votes(partial_path).counts.astype(np.int32)
    params = cfg.algo_params(algo)
    chunks_run = 0
    while done < T:
        if max_chunks is not None and chunks_run >= max_chunks:
            return done, counts, False
        stop = min(done + chunk_size, T)
        counts += ensemble.accumulate_votes_parallel(
            train, algo, params, s, nprime, seed, done, stop, threads)
        done = stop
        chunks_run += 1
        vc = ensemble.VoteCounts(T=done, n_prime=nprime, s=s, counts=counts,
                                 master_seed=seed, algo=algo)
        ensemble.save_votes(partial_path, vc)
        with open(progress_path, "w", encoding="utf-8") as fh:
            json.dump({"completed_t": done,
                       "params": {"algo": algo, "T": T, "s": s,
                                  "nprime": nprime, "seed": seed}}, fh)
    return done, counts, True


def cmd_train(args) -> int:
    cfg = _resolve(args, ("algo", "T", "s", "nprime", "seed", "threads",
                          "chunk_size", "ir.k", "bpr.d", "bpr.epochs",
                          "bpr.learn_rate", "bpr.reg", "bpr.neg_samples"))
    started = time.time()
    train, _, _ = ratings.load_split(args.split)
    algo = cfg["algo"]
    T, s, nprime, seed = int(cfg["T"]), int(cfg["s"]), int(cfg["nprime"]), int(cfg["seed"])
    if s > train.n_users:
        raise ValueError(f"s={s} exceeds the {train.n_users} users in the split")
    done, counts, finished = _train_chunked(
        train, cfg, algo, T, s, nprime, seed, args.out, cfg.threads(),
        int(cfg["chunk_size"]), args.resume, args.max_chunks)
    if not finished:
        print(f"stopped after --max-chunks at t={done}/{T}; "
              f"rerun with --resume to continue")
        return 3
    vc = ensemble.VoteCounts(T=T, n_prime=nprime, s=s, counts=counts,
                             master_seed=seed, algo=algo)
    ensemble.save_votes(args.out, vc)
    for leftover in (args.out + ".partial", args.out + ".progress.json"):
        if os.path.exists(leftover):
            os.remove(leftover)
    _write_manifest(args.out + ".manifest.json", "train",
                    {"split": args.split, "algo": algo, "T": T, "s": s,
                     "nprime": nprime, "seed": seed, "threads": cfg.threads(),
                     "params": str(cfg.algo_params(algo))}, started)
    print(f"built {T} base models (s={s}, N'={nprime}, algo={algo}) -> {args.out}")
    return 0


def cmd_recommend(args) -> int:
    vc = ensemble.load_votes(args.votes)
    train, _, _ = ratings.load_split(args.split)
    users = [int(args.user)] if args.user is not None else range(train.n_users)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["user", "rank", "item", "votes"])
    for u in users:
        for rank, item in enumerate(ensemble.ensemble_recommend(vc, train, u, args.N), 1):
            writer.writerow([u, rank, item, int(vc.counts[u, item])])
    return 0


def _target_sets(target: str, vc, train, tests, N: int):
    if target == "test-items":
        return tests
    return [ensemble.ensemble_recommend(vc, train, u, N)
            for u in range(train.n_users)]


def _sweep_to_rows(sweep, tests, N, e_list, std_triples=None):
    rows = []
    for e in e_list:
        triples = [metrics.certified_metrics(res.r, N, tests.size(res.user))
                   for res in sweep.per_e[e]]
        rows.append(metrics.average_over_users(
            e, triples, std_triples if e == 0 else None))
    return rows


def cmd_certify(args) -> int:
    cfg = _resolve(args, ("alpha", "N", "mode", "e", "bounds.upper_convention"))
    started = time.time()
    if args.exact:
        cfg.values["mode"] = "exact"
    train, tests, _ = ratings.load_split(args.split)
    vc = ensemble.load_votes(args.votes)
    e_list = parse_e_list(cfg["e"])
    if not e_list:
        raise ValueError("certify needs a nonempty e list")
    N = int(cfg["N"])
    alpha = float(cfg["alpha"])
    convention = cfg["bounds.upper_convention"]
    targets = _target_sets(args.target, vc, train, tests, N)
    sweep = certify.certify_sweep(train, vc, targets, alpha, e_list, N,
                                  vc.n_prime, vc.s, cfg["mode"], convention)
    os.makedirs(args.out, exist_ok=True)
    per_user_path = os.path.join(args.out, "per_user.csv")
    with open(per_user_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["user", "e", "r", "mode", "alpha"])
        for e in e_list:
            for res in sweep.per_e[e]:
                w.writerow([res.user, res.e, res.r, res.mode, repr(res.alpha)])
    # aggregate certified metrics only cover users with held-out items
    eligible = [u for u in range(train.n_users)
                if tests.size(u) > 0 and len(targets[u]) > 0]
    agg_sweep = _filter_sweep(sweep, set(eligible))
    rows = _sweep_to_rows(agg_sweep, tests, N, e_list)
    extra = ()
    if args.baseline == "bagging":
        bag = certify.bagging_sweep(train, vc, targets, alpha, e_list, N,
                                    vc.s, cfg["mode"], convention)
        bag = _filter_sweep(bag, set(eligible))
        extra = ("bag_precision", "bag_recall", "bag_f1")
        merged = []
        for row, e in zip(rows, e_list):
            triples = [metrics.certified_metrics(res.r, N, tests.size(res.user))
                       for res in bag.per_e[e]]
            k = len(triples)
            d = {**row.__dict__}
            d["bag_precision"] = sum(t[0] for t in triples) / k
            d["bag_recall"] = sum(t[1] for t in triples) / k
            d["bag_f1"] = sum(t[2] for t in triples) / k
            merged.append(d)
        rows = merged
    metrics.write_metric_csv(os.path.join(args.out, "aggregate.csv"), rows, extra)
    metrics.write_metric_json(os.path.join(args.out, "aggregate.json"), rows)
    _write_manifest(os.path.join(args.out, "manifest.json"), "certify",
                    {"votes": args.votes, "split": args.split,
                     "target": args.target, "alpha": alpha, "N": N,
                     "e_list": e_list, "mode": cfg["mode"],
                     "convention": convention, "baseline": args.baseline,
                     "skipped_users": list(sweep.skipped)}, started)
    print(f"certified {train.n_users - len(sweep.skipped)} users at "
          f"{len(e_list)} attack budgets -> {args.out}")
    return 0


def _filter_sweep(sweep, keep: set):
    return certify.SweepResult(
        per_e={e: [res for res in lst if res.user in keep]
               for e, lst in sweep.per_e.items()},
        skipped=sweep.skipped)


def cmd_evaluate(args) -> int:
    cfg = _resolve(args, ("N",))
    started = time.time()
    train, tests, _ = ratings.load_split(args.split)
    vc = ensemble.load_votes(args.votes)
    N = int(cfg["N"])
    ens_triples, single_triples = [], []
    single = None
    if args.with_single_model:
        params = base_rec.IRParams() if vc.algo == "ir" else base_rec.BPRParams()
        single = base_rec.train_base(vc.algo, train, np.arange(train.n_users), params)
    for u in range(train.n_users):
        if tests.size(u) == 0:
            continue
        recs = ensemble.ensemble_recommend(vc, train, u, N)
        ens_triples.append(metrics.standard_metrics(recs, tests[u], N))
        if single is not None:
            srecs = base_rec.recommend(single, u, N)
            # a full-data model can come up short only on tiny catalogs
            srecs = srecs + [i for i in range(train.n_items)
                             if i not in srecs][:max(0, N - len(srecs))]
            single_triples.append(metrics.standard_metrics(srecs[:N], tests[u], N))
    summary = {
        "N": N,
        "algo": vc.algo,
        "T": vc.T,
        "s": vc.s,
        "n_users_evaluated": len(ens_triples),
        "ensemble": _triple_dict(ens_triples),
    }
    if single_triples:
        summary["single_model"] = _triple_dict(single_triples)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "evaluate.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(args.out, "evaluate.csv"), "w", encoding="utf-8",
              newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["system", "precision", "recall", "f1"])
        w.writerow(["ensemble"] + [summary["ensemble"][k]
                                   for k in ("precision", "recall", "f1")])
        if single_triples:
            w.writerow(["single_model"] + [summary["single_model"][k]
                                           for k in ("precision", "recall", "f1")])
    _write_manifest(os.path.join(args.out, "manifest.json"), "evaluate",
                    {"votes": args.votes, "split": args.split, "N": N,
                     "with_single_model": bool(args.with_single_model)}, started)
    print(json.dumps(summary["ensemble"]))
    return 0


def _triple_dict(triples):
    k = len(triples)
    return {"precision": sum(t[0] for t in triples) / k,
            "recall": sum(t[1] for t in triples) / k,
            "f1": sum(t[2] for t in triples) / k}


def cmd_baseline(args) -> int:
    cfg = _resolve(args, ("alpha", "N", "mode", "e", "bounds.upper_convention"))
    started = time.time()
    if args.exact:
        cfg.values["mode"] = "exact"
    train, tests, _ = ratings.load_split(args.split)
    vc = ensemble.load_votes(args.votes)
    e_list = parse_e_list(cfg["e"])
    N = int(cfg["N"])
    targets = _target_sets(args.target, vc, train, tests, N)
    sweep = certify.bagging_sweep(train, vc, targets, float(cfg["alpha"]),
                                  e_list, N, vc.s, cfg["mode"],
                                  cfg["bounds.upper_convention"])
    eligible = {u for u in range(train.n_users)
                if tests.size(u) > 0 and len(targets[u]) > 0}
    rows = _sweep_to_rows(_filter_sweep(sweep, eligible), tests, N, e_list)
    os.makedirs(args.out, exist_ok=True)
    metrics.write_metric_csv(os.path.join(args.out, "baseline.csv"), rows)
    metrics.write_metric_json(os.path.join(args.out, "baseline.json"), rows)
    _write_manifest(os.path.join(args.out, "manifest.json"), "baseline",
                    {"votes": args.votes, "split": args.split,
                     "target": args.target, "alpha": cfg["alpha"], "N": N,
                     "e_list": e_list, "mode": cfg["mode"]}, started)
    print(f"baseline certified curves for {len(e_list)} budgets -> {args.out}")
    return 0


def _synthetic_matrix(n: int, m: int, density: float, seed: int) -> ratings.RatingMatrix:
    """Random integer-rated matrix for oracle demonstrations."""
    rng = np.random.default_rng(seed)
    users, items, scores = [], [], []
    for u in range(n):
        count = max(1, int(round(density * m)))
        rated = rng.choice(m, size=count, replace=False)
        for i in sorted(int(x) for x in rated):
            users.append(u)
            items.append(i)
            scores.append(float(rng.integers(1, 6)))
    dom = ratings.RatingDomain(lo=1.0, hi=5.0, integral=True)
    return ratings._build_matrix(users, items, scores, dom,
                                 user_ids=np.arange(n), item_ids=np.arange(m))


def cmd_oracle(args) -> int:
    cfg = _resolve(args, ("algo", "s", "nprime", "N", "alpha"))
    if args.data:
        matrix = ratings.load_ratings(args.data, args.format or cfg["format"])
    else:
        matrix = _synthetic_matrix(args.n, args.m, args.density, args.seed)
    algo = cfg["algo"]
    params = cfg.algo_params(algo)
    s, nprime, N = int(cfg["s"]), int(cfg["nprime"]), int(cfg["N"])
    probs = oracle.exact_item_probs(matrix, algo, params, s, nprime)
    print(f"enumerated {probs.n_subsets} subsets "
          f"(n={matrix.n_users}, m={matrix.n_items}, s={s})")
    targets = {u: tuple(oracle.top_n_from_hits(probs, matrix, u, N))
               for u in range(matrix.n_users)}
    n = matrix.n_users
    ctx = certify.make_context(n, args.e, s, True)
    results = []
    for u in range(n):
        b = certify.exact_bounds_from_probs(u, targets[u], probs.prob_row(u),
                                            matrix.n_items)
        q = certify.CertQuery(user=u, items=targets[u], e=args.e, N=N,
                              n_prime=nprime, s=s, bounds=b, ctx=ctx)
        results.append(certify.binary_search_r(q))
    print("certified r per user:", {res.user: res.r for res in results})
    if args.check == "probs":
        return 0
    if args.attack == "two-level-exhaustive":
        report = oracle.exhaustive_two_level_check(
            matrix, algo, params, s, nprime, N, results, targets)
    else:
        report = oracle.attack_soundness_check(
            matrix, algo, params, s, nprime, N, args.e, args.attack,
            args.trials, args.seed + 1, results, targets)
    print(f"attack trials: {report.trials}, violations: {len(report.violations)}")
    if not report.ok:
        for trial, user, got, need in report.violations[:10]:
            print(f"  VIOLATION trial={trial} user={user} |intersection|={got} < r={need}")
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="certrec",
        description="Provably robust ensemble recommenders with certified top-N metrics")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key=value config file; flags override it")

    sp = sub.add_parser("ingest", help="parse ratings and write a train/test split")
    common(sp)
    sp.add_argument("--data", required=True)
    sp.add_argument("--format", choices=ratings.FORMATS)
    sp.add_argument("--fraction", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("train", help="build T base models and persist vote counts")
    common(sp)
    sp.add_argument("--split", required=True)
    sp.add_argument("--algo", choices=("ir", "bpr"))
    sp.add_argument("--T", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--nprime", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--chunk-size", dest="chunk_size", type=int)
    sp.add_argument("--resume", action="store_true",
                    help="continue an interrupted run from its partial votes")
    sp.add_argument("--max-chunks", dest="max_chunks", type=int,
                    help="stop after this many chunks (bounded work per invocation)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("recommend", help="print ensemble top-N from vote counts")
    common(sp)
    sp.add_argument("--votes", required=True)
    sp.add_argument("--split", required=True)
    sp.add_argument("--user", type=int, help="one user; omit for all users")
    sp.add_argument("--N", type=int, default=10)
    sp.set_defaults(func=cmd_recommend)

    sp = sub.add_parser("certify", help="certified intersection sizes and metric floors")
    common(sp)
    sp.add_argument("--votes", required=True)
    sp.add_argument("--split", required=True)
    sp.add_argument("--target", choices=("test-items", "clean-topn"),
                    default="test-items")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--e", help="attack budgets, e.g. 0:30 or 0,5,10")
    sp.add_argument("--mode", choices=("approx", "exact"))
    sp.add_argument("--exact", action="store_true", help="shorthand for --mode exact")
    sp.add_argument("--baseline", choices=("bagging",),
                    help="also compute the single-competitor baseline columns")
    sp.add_argument("--upper-convention", dest="bounds_upper_convention",
                    choices=bounds_conventions())
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("evaluate", help="standard Precision/Recall/F1 at e=0")
    common(sp)
    sp.add_argument("--votes", required=True)
    sp.add_argument("--split", required=True)
    sp.add_argument("--N", type=int)
    sp.add_argument("--with-single-model", action="store_true",
                    help="also evaluate one model trained on the full matrix")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("baseline", help="single-competitor baseline certification only")
    common(sp)
    sp.add_argument("--votes", required=True)
    sp.add_argument("--split", required=True)
    sp.add_argument("--target", choices=("test-items", "clean-topn"),
                    default="test-items")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--N", type=int)
    sp.add_argument("--e")
    sp.add_argument("--mode", choices=("approx", "exact"))
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("oracle", help="exact enumeration and attack falsification "
                                       "on tiny instances")
    common(sp)
    sp.add_argument("--data", help="tiny rating file; omit for a synthetic matrix")
    sp.add_argument("--format", choices=ratings.FORMATS)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--m", type=int, default=6)
    sp.add_argument("--density", type=float, default=0.7)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--algo", choices=("ir", "bpr"))
    sp.add_argument("--s", type=int)
    sp.add_argument("--nprime", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--e", type=int, default=1)
    sp.add_argument("--check", choices=("probs", "soundness"), default="soundness")
    sp.add_argument("--attack", choices=oracle.ATTACKS + ("two-level-exhaustive",),
                    default="random-ratings")
    sp.add_argument("--trials", type=int, default=20)
    sp.set_defaults(func=cmd_oracle)
    return p


def bounds_conventions():
    from .bounds import UPPER_CONVENTIONS
    return UPPER_CONVENTIONS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ratings.ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
