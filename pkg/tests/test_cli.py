import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from polyrenyi.cli import main, render


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text), text


def parse_csv(text):
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, v = line[2:].split("=", 1)
            meta[k] = v
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))


def test_density_example():
    code, env, _ = run_json("density", "--q", "2", "--max-excess", "0", "--eps", "1e-12")
    assert code == 0
    row = env["rows"][0]
    assert row["k"] == "0"
    assert Fraction(row["lo"]) <= Fraction(1, 2) <= Fraction(row["hi"])
    assert env["schema"] == "1" and env["command"] == "density"
    assert int(env["meta"]["truncation_degree"]) >= 1


def test_count_example():
    code, env, _ = run_json("count", "--q", "3", "--max-degree", "4", "--max-excess", "3")
    assert code == 0
    rows = {(r["n"], r["k"]): r for r in env["rows"]}
    assert rows[("4", "0")]["e_nk"] == "54"
    assert rows[("4", "0")]["d_nk"] == "2/3"
    assert rows[("0", "0")]["d_nk"] == "1"


def test_verify_example():
    code, env, _ = run_json("verify", "--q", "2", "--max-degree", "14", "--threads", "2")
    assert code == 0
    assert env["meta"]["mismatches"] == "0"
    assert all(r["match"] == "true" for r in env["rows"])


def test_nu_with_sieve_check():
    code, env, _ = run_json("nu", "--q", "4", "--max-degree", "6", "--sieve-check")
    assert code == 0
    assert [r["nu"] for r in env["rows"]] == ["4", "6", "20", "60", "204", "670"]
    assert all(r["nu"] == r["sieve"] for r in env["rows"])
    assert env["meta"]["degree_sum_identity"] == "True"


def test_nu_list():
    code, env, _ = run_json("nu", "--q", "2", "--max-degree", "3", "--list")
    assert env["rows"][2]["irreducibles"] == "x^3+x+1;x^3+x^2+1"


def test_asymptotic_verdict(capsys):
    code, env, _ = run_json("asymptotic", "--q", "2")
    assert code == 0
    assert env["meta"]["form"] == "pole-order"
    assert "pole-order constant" in env["meta"]["verdict"]
    names = [r["quantity"] for r in env["rows"]]
    assert names[:2] == ["A_reduced_order", "A_pole_order"]
    assert "verdict:" in capsys.readouterr().err


def test_integers():
    code, env, _ = run_json("integers", "--limit", "100000", "--max-excess", "3", "--prime-limit", "1000")
    assert code == 0
    r0 = env["rows"][0]
    assert abs(Fraction(r0["empirical"]) - Fraction(r0["lo"])) < Fraction(1, 100)
    delta = Fraction("0.378695032034372814447729813912")
    assert Fraction(env["meta"]["delta_lo"]) <= delta <= Fraction(env["meta"]["delta_hi"])


@pytest.mark.parametrize(
    "argv",
    [
        ["nu", "--q", "6", "--max-degree", "3"],
        ["nu", "--q", "2"],
        ["bogus"],
        ["density", "--q", "2", "--max-excess", "1", "--eps", "2"],
        ["density", "--q", "2", "--max-excess", "-1", "--eps", "0.1"],
        ["verify", "--q", "2", "--max-degree", "30"],
        ["integers", "--limit", "10", "--max-excess", "1", "--prime-limit", "2"],
        ["count", "--q", "2", "--max-degree", "x", "--max-excess", "1"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, text = run(*argv)
    assert code == 2 and text == ""


def test_unreachable_eps_exits_1():
    code, env, _ = run_json("density", "--q", "2", "--max-excess", "2", "--eps", "1e-30",
                            "--precision", "40")
    assert code == 1 and env["meta"]["achieved"] == "false"


def test_global_flags_after_subcommand():
    a = run("count", "--q", "2", "--max-degree", "3", "--max-excess", "1", "--format", "csv")
    b = run("--format", "csv", "count", "--q", "2", "--max-degree", "3", "--max-excess", "1")
    assert a == b and a[1].startswith("# command=count")


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--q", "4", "--max-degree", "5", "--max-excess", "3"],
        ["density", "--q", "3", "--max-excess", "4", "--eps", "1e-10"],
        ["nu", "--q", "9", "--max-degree", "5"],
        ["integers", "--limit", "5000", "--max-excess", "2", "--prime-limit", "200", "--eps", "1e-8"],
    ],
)
def test_json_round_trip_and_csv_agreement(argv):
    code, env, text = run_json(*argv)
    assert render(env["command"], env["params"], env["rows"], env["meta"], "json") == text
    code2, csv_text = run(*argv, "--format", "csv")
    assert code2 == code
    meta, rows = parse_csv(csv_text)
    assert rows == env["rows"]
    for k, v in env["meta"].items():
        assert meta[k] == v
    for k, v in env["params"].items():
        assert meta["param." + k] == v


def test_deterministic_bytes():
    argv = ["density", "--q", "5", "--max-excess", "6", "--eps", "1e-9"]
    assert run(*argv) == run(*argv)


def test_digits_flag():
    _, env, _ = run_json("density", "--q", "2", "--max-excess", "0", "--eps", "1e-12", "--digits", "5")
    assert env["rows"][0]["lo"].split("e")[0] in ("4.9999", "5.0000")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polyrenyi", "count", "--q", "2", "--max-degree", "2", "--max-excess", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][-1]["e_nk"] == "2"
    bad = subprocess.run([sys.executable, "-m", "polyrenyi", "nu", "--q", "1"], capture_output=True, text=True)
    assert bad.returncode == 2
