import csv
import io
import json

import pytest

from p2lab.cli import main, number, rational


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_p2_csv(capsys):
    code, out, _ = run(capsys, "count-p2", "--poly", "1,0,1", "--x", "10000", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and set(rows[0]) == {"x", "count", "count_distinct", "threshold", "ratio"}
    assert "\r" not in out and out.endswith("\n")


def test_constant(capsys):
    code, out, _ = run(capsys, "constant", "--alpha", "16/15", "--gamma", "1/5")
    row = next(csv.DictReader(io.StringIO(out)))
    assert code == 0 and abs(float(row["ratio"]) - 0.014057) <= 5e-6
    assert row["alpha"] == "16/15"


def test_json_shape(capsys):
    code, out, _ = run(capsys, "constant", "--dual", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and set(obj) == {"params", "results", "diagnostics"}
    assert obj["params"]["gamma"] == "1/5" and "four_term_ratio" in obj["diagnostics"]


def test_reducible_exit_2(capsys):
    code, _, err = run(capsys, "rho", "--poly", "1,0,-4")
    assert code == 2 and "reducible" in err


@pytest.mark.parametrize("argv", [
    ["bogus"], [], ["rho", "--poly", "1,0"], ["constant", "--alpha", "x"], ["count-p2", "--x", "1.5"],
    ["smooth", "--width", "0.3"], ["equidist", "--poly", "256,0,1", "--M", "100", "--q", "4"],
    ["rho", "--workers", "0"], ["gamma", "--poly", "1,1,2"],
])
def test_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "count-p2", "--help")
    assert code == 0 and "columns x,count" in out


@pytest.mark.parametrize("argv", [
    ["rho", "--dmax", "20"], ["roots", "--d", "65"], ["gamma"], ["singular", "--shifted", "--q", "1", "5"],
    ["mertens", "--shifted", "--z", "100"], ["nagel", "--shifted", "--t", "1000", "--t0", "100", "--t1", "1e4"],
    ["sieve-fns", "--s", "2.5", "6"], ["weights", "--shifted", "--x", "2000"],
    ["dispersion", "--x", "5000", "--M", "10", "--N", "5"], ["gauss", "--dmax", "500"],
    ["kloosterman", "--smax", "10", "--hmax", "3", "--seed", "5"], ["smooth", "--order", "200"],
    ["equidist", "--poly", "256,0,1", "--M", "500"],
])
def test_subcommands_csv_and_json(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) >= 2 and all(len(r) == len(rows[0]) for r in rows)
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0 and json.loads(out)["results"]


def test_rho_values(capsys):
    _, out, _ = run(capsys, "roots", "--poly", "1,0,1", "--d", "65")
    assert [r["root"] for r in csv.DictReader(io.StringIO(out))] == ["8", "18", "47", "57"]


def test_kloosterman_seed_reproducible(capsys):
    a = run(capsys, "kloosterman", "--smax", "15", "--hmax", "2", "--seed", "3")[1]
    b = run(capsys, "kloosterman", "--smax", "15", "--hmax", "2", "--seed", "3")[1]
    assert a == b


def test_parsers():
    from fractions import Fraction
    assert rational("16/15") == Fraction(16, 15)
    assert rational("0.2") == Fraction(1, 5)
    assert number("1e6") == 10**6 and number("10**6") == 10**6 and number("123") == 123
