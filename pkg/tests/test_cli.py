"""End-to-end command-line behavior, run in-process through main()."""

import csv
import json
import os

import numpy as np
import pytest

from certrec import cli, ensemble


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cliwork")
    rng = np.random.default_rng(7)
    lines = []
    for u in range(1, 31):
        items = rng.choice(24, size=int(rng.integers(8, 16)), replace=False) + 1
        for i in sorted(int(x) for x in items):
            lines.append(f"{u}\t{i}\t{int(rng.integers(1, 6))}\t881250949")
    data = root / "ratings.tsv"
    data.write_text("\n".join(lines) + "\n")
    return root, str(data)


@pytest.fixture(scope="module")
def split(dataset):
    root, data = dataset
    out = str(root / "split.txt")
    assert cli.main(["ingest", "--data", data, "--out", out, "--seed", "3"]) == 0
    return out


@pytest.fixture(scope="module")
def votes(dataset, split):
    root, _ = dataset
    out = str(root / "votes.txt")
    assert cli.main(["train", "--split", split, "--algo", "ir", "--T", "200",
                     "--s", "8", "--seed", "5", "--out", out]) == 0
    return out


class TestIngest:
    def test_outputs(self, dataset, split):
        root, _ = dataset
        assert os.path.exists(split)
        assert os.path.exists(split + ".ids.csv")
        manifest = json.load(open(split + ".manifest.json"))
        assert manifest["command"] == "ingest"
        assert manifest["params"]["seed"] == 3
        with open(split + ".ids.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["kind", "internal", "external"]
        users = [r for r in rows if r[0] == "user"]
        assert users[0][1] == "0" and users[0][2] == "1"

    def test_missing_file_is_error_exit(self, dataset, capsys):
        root, _ = dataset
        code = cli.main(["ingest", "--data", str(root / "nope.tsv"),
                         "--out", str(root / "x")])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestTrain:
    def test_votes_file(self, votes):
        vc = ensemble.load_votes(votes)
        assert vc.T == 200 and vc.s == 8 and vc.algo == "ir"
        manifest = json.load(open(votes + ".manifest.json"))
        assert manifest["params"]["T"] == 200

    def test_chunked_resume_identical(self, dataset, split, votes):
        root, _ = dataset
        out = str(root / "votes_chunked.txt")
        code = cli.main(["train", "--split", split, "--algo", "ir", "--T",
                         "200", "--s", "8", "--seed", "5", "--out", out,
                         "--chunk-size", "70", "--max-chunks", "2"])
        assert code == 3
        assert os.path.exists(out + ".partial")
        assert not os.path.exists(out)
        code = cli.main(["train", "--split", split, "--algo", "ir", "--T",
                         "200", "--s", "8", "--seed", "5", "--out", out,
                         "--chunk-size", "70", "--resume"])
        assert code == 0
        assert open(out).read() == open(votes).read()
        assert not os.path.exists(out + ".partial")
        assert not os.path.exists(out + ".progress.json")

    def test_resume_with_changed_params_rejected(self, dataset, split):
        root, _ = dataset
        out = str(root / "votes_stale.txt")
        assert cli.main(["train", "--split", split, "--algo", "ir", "--T",
                         "100", "--s", "8", "--seed", "5", "--out", out,
                         "--chunk-size", "40", "--max-chunks", "1"]) == 3
        code = cli.main(["train", "--split", split, "--algo", "ir", "--T",
                         "100", "--s", "7", "--seed", "5", "--out", out,
                         "--chunk-size", "40", "--resume"])
        assert code == 2

    def test_threads_env_fallback(self, dataset, split, votes, monkeypatch):
        root, _ = dataset
        out = str(root / "votes_env.txt")
        monkeypatch.setenv("PORE_THREADS", "3")
        assert cli.main(["train", "--split", split, "--algo", "ir", "--T",
                         "200", "--s", "8", "--seed", "5", "--out", out]) == 0
        assert open(out).read() == open(votes).read()

    def test_s_larger_than_n_rejected(self, dataset, split):
        root, _ = dataset
        code = cli.main(["train", "--split", split, "--algo", "ir", "--T",
                         "10", "--s", "500", "--out", str(root / "v")])
        assert code == 2


class TestRecommend:
    def test_csv_output(self, split, votes, capsys):
        assert cli.main(["recommend", "--votes", votes, "--split", split,
                         "--user", "0", "--N", "4"]) == 0
        out = capsys.readouterr().out.strip().split("\n")
        assert out[0] == "user,rank,item,votes"
        assert len(out) == 5
        ranks = [int(line.split(",")[1]) for line in out[1:]]
        assert ranks == [1, 2, 3, 4]


class TestCertify:
    def test_outputs_and_columns(self, dataset, split, votes):
        root, _ = dataset
        out = str(root / "cert")
        assert cli.main(["certify", "--votes", votes, "--split", split,
                         "--alpha", "0.2", "--e", "0,1,2", "--out", out]) == 0
        with open(os.path.join(out, "per_user.csv")) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["user", "e", "r", "mode", "alpha"]
        assert {r[1] for r in rows[1:]} == {"0", "1", "2"}
        with open(os.path.join(out, "aggregate.csv")) as fh:
            agg = list(csv.reader(fh))
        assert agg[0] == ["e", "cert_precision", "cert_recall", "cert_f1",
                          "n_users"]
        assert len(agg) == 4
        # nonincreasing certified precision across the three budgets
        precs = [float(r[1]) for r in agg[1:]]
        assert precs[0] >= precs[1] >= precs[2]

    def test_bagging_columns(self, dataset, split, votes):
        root, _ = dataset
        out = str(root / "cert_bag")
        assert cli.main(["certify", "--votes", votes, "--split", split,
                         "--alpha", "0.2", "--e", "0:1", "--baseline",
                         "bagging", "--out", out]) == 0
        with open(os.path.join(out, "aggregate.csv")) as fh:
            agg = list(csv.reader(fh))
        assert agg[0][-3:] == ["bag_precision", "bag_recall", "bag_f1"]
        for row in agg[1:]:
            assert float(row[1]) >= float(row[-3]) - 1e-12

    def test_exact_flag(self, dataset, split, votes):
        root, _ = dataset
        out = str(root / "cert_exact")
        assert cli.main(["certify", "--votes", votes, "--split", split,
                         "--alpha", "0.2", "--e", "0", "--exact",
                         "--out", out]) == 0
        with open(os.path.join(out, "per_user.csv")) as fh:
            rows = list(csv.reader(fh))
        assert all(r[3] == "exact" for r in rows[1:])

    def test_clean_topn_target(self, dataset, split, votes):
        root, _ = dataset
        out = str(root / "cert_topn")
        assert cli.main(["certify", "--votes", votes, "--split", split,
                         "--alpha", "0.2", "--e", "0", "--target",
                         "clean-topn", "--out", out]) == 0
        manifest = json.load(open(os.path.join(out, "manifest.json")))
        assert manifest["params"]["target"] == "clean-topn"

    def test_empty_e_rejected(self, dataset, split, votes):
        root, _ = dataset
        assert cli.main(["certify", "--votes", votes, "--split", split,
                         "--e", ",", "--out", str(root / "x")]) == 2


class TestEvaluateAndBaseline:
    def test_evaluate(self, dataset, split, votes, capsys):
        root, _ = dataset
        out = str(root / "eval")
        assert cli.main(["evaluate", "--votes", votes, "--split", split,
                         "--with-single-model", "--out", out]) == 0
        data = json.load(open(os.path.join(out, "evaluate.json")))
        assert 0 <= data["ensemble"]["precision"] <= 1
        assert "single_model" in data
        assert data["n_users_evaluated"] > 0

    def test_baseline(self, dataset, split, votes):
        root, _ = dataset
        out = str(root / "bag")
        assert cli.main(["baseline", "--votes", votes, "--split", split,
                         "--alpha", "0.2", "--e", "0:2", "--out", out]) == 0
        with open(os.path.join(out, "baseline.csv")) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 4


class TestOracleCommand:
    def test_soundness_pass(self, capsys):
        code = cli.main(["oracle", "--n", "6", "--m", "5", "--density", "0.7",
                         "--seed", "2", "--s", "3", "--e", "1", "--N", "3",
                         "--trials", "6"])
        assert code == 0
        out = capsys.readouterr().out
        assert "violations: 0" in out

    def test_probs_only(self, capsys):
        code = cli.main(["oracle", "--n", "5", "--m", "4", "--s", "2",
                         "--check", "probs"])
        assert code == 0
        assert "enumerated 10 subsets" in capsys.readouterr().out

    def test_two_level_exhaustive(self, capsys):
        code = cli.main(["oracle", "--n", "5", "--m", "4", "--density", "0.8",
                         "--seed", "1", "--s", "2", "--e", "1", "--N", "2",
                         "--attack", "two-level-exhaustive"])
        assert code == 0
        assert "trials: 16" in capsys.readouterr().out


class TestConfig:
    def test_file_values_and_flag_precedence(self, dataset, split, votes):
        root, _ = dataset
        conf = root / "conf.txt"
        conf.write_text("alpha=0.05\nN=5\n")
        out = str(root / "cert_conf")
        assert cli.main(["certify", "--votes", votes, "--split", split,
                         "--config", str(conf), "--alpha", "0.1", "--e", "0",
                         "--out", out]) == 0
        manifest = json.load(open(os.path.join(out, "manifest.json")))
        assert manifest["params"]["alpha"] == 0.1  # flag wins
        assert manifest["params"]["N"] == 5        # file fills the rest

    def test_unknown_key_rejected(self, tmp_path):
        conf = tmp_path / "bad.txt"
        conf.write_text("bogus=1\n")
        with pytest.raises(ValueError, match="unknown key"):
            cli.parse_config_file(str(conf))

    def test_malformed_line_rejected(self, tmp_path):
        conf = tmp_path / "bad.txt"
        conf.write_text("alpha 0.05\n")
        with pytest.raises(ValueError, match="key=value"):
            cli.parse_config_file(str(conf))

    def test_parse_e_list(self):
        assert cli.parse_e_list("0:4") == [0, 1, 2, 3, 4]
        assert cli.parse_e_list("7") == [7]
        assert cli.parse_e_list("3,1,2") == [1, 2, 3]
        assert cli.parse_e_list("0:2,5,8:9") == [0, 1, 2, 5, 8, 9]
        assert cli.parse_e_list("4,4,4") == [4]
        assert cli.parse_e_list(",") == []
