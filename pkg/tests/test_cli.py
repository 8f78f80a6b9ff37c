import csv
import io
import json
import subprocess
import sys

import pytest

from bincp.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, EXIT_TIMEOUT, RunConfig, InputError, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_bincounts_example():
    assert run("bincounts", "--values", "1,1,5,3,1,2,1,1,3,1", "--bins", "1,3,4,6")[:2] == (EXIT_OK, "7 2 1\n")


def test_bincounts_empty_and_out_of_range():
    assert run("bincounts", "--values", "", "--bins", "0,2,4")[:2] == (EXIT_OK, "0 0\n")
    code, _, err = run("bincounts", "--values", "9", "--bins", "0,2,4")
    assert code == EXIT_INPUT and "outside" in err
    assert run("bincounts", "--values", "9", "--bins", "0,2,4", "--hidden")[:2] == (EXIT_OK, "0 0\n")


def test_ci_table():
    code, out, _ = run("ci", "--counts", "3,5,2", "--alpha", "0.1")
    assert code == EXIT_OK
    rows = [line.split() for line in out.splitlines()[1:]]
    assert [r[2:] for r in rows] == [["0.0981", "0.6280"], ["0.2192", "0.7808"], ["0.0509", "0.5383"]]


def test_ci_degenerate_and_bad_alpha():
    code, out, _ = run("ci", "--counts", "4,0", "--alpha", "0.1")
    assert code == EXIT_OK and "1.0000" in out.splitlines()[1] and "0.0000" in out.splitlines()[2]
    for alpha in ("0", "1"):
        assert run("ci", "--counts", "3,5,2", "--alpha", alpha)[0] == EXIT_INPUT
    assert run("ci", "--alpha", "0.1")[0] == EXIT_INPUT


def test_bacp_bundled_json():
    code, out, _ = run("bacp", "--time-limit", "60")
    report = json.loads(out)
    assert code == EXIT_OK
    assert set(report) >= {"instance", "mode", "nodes", "failures", "time_s", "solution", "statistic"}
    assert report["statistic"] == 0.0 and report["solution"]["occurrences"] == [1, 2, 4, 2, 1]


def test_bacp_timeout_exit_code():
    assert run("bacp", "--mode", "dec", "--time-limit", "0.001")[0] == EXIT_TIMEOUT


def test_bacp_bad_file(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 1 0 1 0 5\nx notanumber\n")
    code, _, err = run("bacp", str(p))
    assert code == EXIT_INPUT and "line 2" in err
    assert run("bacp", str(tmp_path / "missing.txt"))[0] == EXIT_INPUT


def test_bacp_infeasible_exit_code(tmp_path):
    p = tmp_path / "tight.txt"
    p.write_text("2 2 1 1 1 9\na 3\nb 3\nprereq a b\nprereq b a\n")
    assert run("bacp", str(p))[0] == EXIT_INPUT  # cyclic prerequisites
    p.write_text("3 2 1 1 1 9\na 3\nb 3\nc 3\n")
    assert run("bacp", str(p), "--bins", "0,5,10", "--targets", "1,1")[0] == EXIT_INFEASIBLE


def test_bnwp_bundled():
    code, out, _ = run("bnwp", "--format", "csv")
    assert code == EXIT_OK
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["status"] == "optimal" and float(row["statistic"]) == 4.0


def test_compare_rows_and_determinism(tmp_path):
    out_file = tmp_path / "study.csv"
    code, _, _ = run("compare", "--seeds", "4", "--branching", "lex", "--format", "csv", "--out", str(out_file))
    assert code == EXIT_OK
    rows = list(csv.DictReader(out_file.open()))
    assert len(rows) == 12 and all(r["dominates_dec"] == "True" for r in rows)
    again = json.loads(run("compare", "--seeds", "4", "--branching", "lex")[1])
    first = json.loads(run("compare", "--seeds", "4", "--branching", "lex", "--jobs", "2")[1])
    strip = lambda rs: [{k: v for k, v in r.items() if k != "time_s"} for r in rs]
    assert strip(again) == strip(first)


def test_compare_rejects_bad_modes():
    assert run("compare", "--seeds", "2", "--modes", "dec,lp")[0] == EXIT_INPUT
    assert run("compare", "--seeds", "x")[0] == EXIT_INPUT


def test_chi2_demo_report():
    code, out, _ = run("chi2", "--alpha", "0.99")
    report = json.loads(out)
    assert code == EXIT_OK and report["statistic"] <= 0.5543


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig("bacp", time_limit=0)
    with pytest.raises(InputError):
        RunConfig("bacp", mode="lp")
    assert run("bacp", "--time-limit", "-1")[0] == EXIT_INPUT


def test_bad_subcommand():
    assert run("frobnicate")[0] == EXIT_INPUT


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bincp.cli", "bincounts", "--values", "1,4", "--bins", "0,2,5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1 1\n"
