import csv
import json
import math

import numpy as np
import pytest

from caketest import binomial, linear_model, normal
from caketest.cake_core import PriorSettings
from caketest.cli import SCHEMA_VERSION, main


def write_column(path, values, header=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([header])
        for v in values:
            w.writerow([repr(float(v))])
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv)
    assert code == 0, err
    return json.loads(out), err


def sig10(x):
    return float(format(x, ".10g"))


class TestGolden:
    def test_one_sample(self, tmp_path, capsys):
        x = np.random.default_rng(0).normal(0.3, 1.0, 40)
        path = write_column(tmp_path / "x.csv", x, header="value")
        payload, err = run_json(capsys, ["test", "one-sample", "--mu0", "0.1", "--delta", "0.5", path])
        ref = normal.one_sample(x, 0.1, PriorSettings(delta=0.5))
        assert payload["schema_version"] == SCHEMA_VERSION
        assert payload["lambda_bayes"] == sig10(ref.lambda_bayes)
        assert payload["lambda_lrt"] == sig10(ref.lambda_lrt)
        assert payload["log_bf01"] == sig10(ref.log_bf01)
        assert payload["posterior_odds"] == sig10(ref.posterior_odds_01)
        assert payload["equivalent_alpha"] == sig10(ref.equivalent_alpha)
        assert payload["decision"] == ref.decision.value
        assert payload["interpretation"]["label"] == ref.interpretation.label
        assert payload["settings"]["h"] == "inf"
        assert ref.decision.value in err

    def test_two_point_file(self, tmp_path, capsys):
        path = write_column(tmp_path / "x.csv", [-1, 1])
        payload, _ = run_json(capsys, ["test", "one-sample", "--mu0", "0", path])
        assert payload["lambda_bayes"] == pytest.approx(-math.log(2), abs=1e-9)
        assert payload["decision"] == "prefer_H0"

    def test_two_sample(self, tmp_path, capsys):
        a = write_column(tmp_path / "a.csv", [-1, 0, 1])
        b = write_column(tmp_path / "b.csv", [-1, 0, 1])
        payload, _ = run_json(capsys, ["test", "two-sample", a, b])
        assert payload["lambda_lrt"] == 0.0
        ref = normal.two_sample([-1, 0, 1], [-1, 0, 1])
        assert payload["lambda_bayes"] == sig10(ref.lambda_bayes)

    def test_binom(self, capsys):
        payload, _ = run_json(capsys, ["test", "binom", "--s", "52263470", "--n", "104490000"])
        assert payload["lambda_bayes"] == pytest.approx(-5.86, abs=0.01)
        assert payload["decision"] == "prefer_H0"
        assert payload["lambda_bayes"] == sig10(binomial.binomial_jeffreys(52263470, 104490000).lambda_bayes)

    def test_binom_csv(self, capsys):
        code, out, _ = run(capsys, ["test", "binom", "--s", "60", "--n", "100", "--format", "csv"])
        assert code == 0
        rows = list(csv.DictReader(out.splitlines()))
        assert float(rows[0]["lambda_bayes"]) == sig10(binomial.binomial_jeffreys(60, 100).lambda_bayes)
        assert rows[0]["interpretation.favours"] == "H0"

    @pytest.mark.parametrize("h", ["inf", "1e6"])
    def test_z(self, tmp_path, capsys, h):
        x = np.random.default_rng(1).normal(0.4, 2.0, 25)
        path = write_column(tmp_path / "x.csv", x)
        payload, _ = run_json(capsys, ["test", "z", "--mu0", "0", "--sigma2", "4", "--h", h, path])
        ref = normal.z_test_augmented(x, 0.0, 4.0, settings=PriorSettings(h=float(h)))
        assert payload["lambda_bayes"] == sig10(ref.lambda_bayes)

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, stdout, _ = run(capsys, ["test", "binom", "--s", "3", "--n", "10", "--out", str(out)])
        assert code == 0 and stdout == ""
        assert json.loads(out.read_text())["n"] == 10


class TestConvergence:
    def test_h_1e12_matches_limit(self, tmp_path, capsys):
        x = np.random.default_rng(2).normal(0.2, 1.0, 30)
        path = write_column(tmp_path / "x.csv", x)
        lim, _ = run_json(capsys, ["test", "one-sample", "--h", "inf", path])
        fin, _ = run_json(capsys, ["test", "one-sample", "--h", "1e12", path])
        assert abs(lim["lambda_bayes"] - fin["lambda_bayes"]) <= 1e-3

    def test_overwhelming_preference(self, tmp_path, capsys):
        wins = 0
        for seed in range(20):
            x = np.random.default_rng(seed).normal(0.5, 1.0, 1000)
            payload, _ = run_json(capsys, ["test", "one-sample", write_column(tmp_path / "x.csv", x)])
            wins += payload["decision"] == "prefer_H1"
        assert wins == 20


@pytest.fixture
def regression_csv(tmp_path):
    rng = np.random.default_rng(3)
    X = rng.standard_normal((80, 3))
    y = 1.0 + 0.8 * X[:, 0] + rng.standard_normal(80)
    path = tmp_path / "reg.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "a", "b", "c"])
        w.writerows(np.column_stack([y, X]).tolist())
    return str(path), y, X


class TestLinear:
    def test_equal_models(self, regression_csv, capsys):
        payload, _ = run_json(capsys, ["test", "linear", "--gamma0", "100", "--gamma1", "100",
                                       regression_csv[0]])
        assert payload["lambda_bayes"] == 0.0

    def test_golden(self, regression_csv, capsys):
        path, y, X = regression_csv
        payload, _ = run_json(capsys, ["test", "linear", "--gamma0", "000", "--gamma1", "110", path])
        ref = linear_model.linear_test(linear_model.standardize(y, X), "000", "110")
        assert payload["lambda_bayes"] == sig10(ref.lambda_bayes)
        assert payload["extras"]["bic0"] == sig10(ref.extras["bic0"])

    def test_select(self, regression_csv, capsys):
        path, y, X = regression_csv
        payload, err = run_json(capsys, ["test", "linear", "--select", "--max-size", "2", path])
        data = linear_model.standardize(y, X)
        ref = linear_model.select_model(data, linear_model.enumerate_models(3, 2))
        assert [r["gamma"] for r in payload["ranking"]] == [r["gamma"] for r in ref]
        assert len(payload["ranking"]) == 7
        assert payload["columns"] == ["a", "b", "c"]
        assert "best model" in err

    def test_rank_deficiency_names_columns(self, tmp_path, capsys):
        rng = np.random.default_rng(4)
        a = rng.standard_normal(30)
        rows = np.column_stack([rng.standard_normal(30), a, 2 * a])
        path = tmp_path / "d.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y", "left", "right"])
            w.writerows(rows.tolist())
        code, _, err = run(capsys, ["test", "linear", "--gamma0", "00", "--gamma1", "11", str(path)])
        assert code == 3
        assert "left" in err and "right" in err

    def test_flag_conflicts(self, regression_csv, capsys):
        code, _, _ = run(capsys, ["test", "linear", "--select", "--gamma0", "000", regression_csv[0]])
        assert code == 2
        code, _, _ = run(capsys, ["test", "linear", "--gamma0", "000", regression_csv[0]])
        assert code == 2


class TestExitCodes:
    def test_degenerate_sample(self, tmp_path, capsys):
        code, _, err = run(capsys, ["test", "one-sample", write_column(tmp_path / "c.csv", [2, 2, 2])])
        assert code == 3
        assert "degenerate" in err

    def test_bad_row_named(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("1.0\n2.0\nabc\n")
        code, _, err = run(capsys, ["test", "one-sample", str(path)])
        assert code == 2
        assert "row 3" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(capsys, ["test", "one-sample", str(tmp_path / "none.csv")])
        assert code == 2

    def test_bad_binomial(self, capsys):
        code, _, _ = run(capsys, ["test", "binom", "--s", "11", "--n", "10"])
        assert code == 2

    def test_bad_scenario(self, tmp_path, capsys):
        path = tmp_path / "s.ini"
        path.write_text("[scenario]\nfamily = binomial\ntruths = 0.5\n")
        code, _, err = run(capsys, ["simulate", "--scenario", str(path), "--out", str(tmp_path)])
        assert code == 2
        assert "n_grid" in err

    def test_bad_h(self, tmp_path, capsys):
        path = write_column(tmp_path / "x.csv", [1, 2, 4])
        with pytest.raises(SystemExit) as exc:
            main(["test", "z", "--sigma2", "1", "--h", "big", path])
        assert exc.value.code == 2


class TestSimulateCommand:
    def test_byte_identical(self, tmp_path, capsys):
        args = ["simulate", "--scenario", "fig2_desk", "--replicates", "300", "--no-svg"]
        assert run(capsys, args + ["--out", str(tmp_path / "a"), "--workers", "1"])[0] == 0
        assert run(capsys, args + ["--out", str(tmp_path / "b"), "--workers", "3"])[0] == 0
        a = (tmp_path / "a" / "fig2_desk.csv").read_bytes()
        assert a == (tmp_path / "b" / "fig2_desk.csv").read_bytes()
        assert b"\r\n" in a

    def test_monotone_type_one_column(self, tmp_path, capsys):
        code, out, _ = run(capsys, ["simulate", "--scenario", "fig2_desk", "--replicates", "4000",
                                    "--out", str(tmp_path)])
        assert code == 0
        rows = [r for r in csv.DictReader(open(tmp_path / "fig2_desk.csv", newline=""))
                if float(r["truth"]) == 0.0]
        rates = [float(r["bayes_rate"]) for r in sorted(rows, key=lambda r: int(r["n"]))]
        assert all(a > b for a, b in zip(rates, rates[1:]))
        assert (tmp_path / "fig2_desk.svg").exists()


class TestTable2Command:
    def test_cell(self, tmp_path, capsys):
        path = tmp_path / "t2.csv"
        code, out, _ = run(capsys, ["table2", "--out", str(path)])
        assert code == 0
        rows = list(csv.DictReader(open(path, newline="")))
        cell = next(r for r in rows if r["panel"] == "p_value" and r["nu"] == "1"
                    and float(r["lambda_bayes"]) == 2 and r["n"] == "100")
        assert f"{float(cell['p_value']):.2E}" == "1.02E-02"
        assert "1.02E-02" in out
